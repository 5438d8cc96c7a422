"""Gradient rules for parameterized circuit objectives."""
from __future__ import annotations

import math

import numpy as np

SHIFT = math.pi / 2


def parameter_shift_gradient(f, params, shift=SHIFT) -> list[float]:
    """df/dx_i = (f(x + s e_i) - f(x - s e_i)) / (2 sin s), with s = pi/2 by default.

    Exact when every variable drives one Pauli rotation with unit scale
    (all catalog rotations qualify); `f` may return a scalar or an array.
    """
    x = np.asarray(params, dtype=float)
    denom = 2.0 * math.sin(shift)
    grad = []
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = shift
        grad.append((np.asarray(f(list(x + step))) - np.asarray(f(list(x - step)))) / denom)
    return [g.tolist() if g.ndim else float(g) for g in grad]


def central_difference_gradient(f, params, h=1e-5) -> list[float]:
    x = np.asarray(params, dtype=float)
    grad = []
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        grad.append((np.asarray(f(list(x + step))) - np.asarray(f(list(x - step)))) / (2.0 * h))
    return [g.tolist() if g.ndim else float(g) for g in grad]


GRADIENTS = {
    "parameter-shift": parameter_shift_gradient,
    "central-difference": central_difference_gradient,
}
