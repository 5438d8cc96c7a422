"""Optimizer contract: Nelder-Mead and gradient descent with parameter-shift gradients."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from errors import BadOption, VariantMismatch
from gradients import parameter_shift_gradient
from hetmap import HetMap, Variant
from log import get_logger

logger = get_logger("optimizer")

DEFAULT_MAXEVAL = 500
DEFAULT_FTOL = 1e-6
DEFAULT_XTOL = 1e-6
DEFAULT_STEP = 0.05
DEFAULT_INITIAL_STEP = 0.5

_ALIASES = {"nlopt-maxeval": "maxeval", "nlopt-ftol": "ftol"}


@dataclass
class OptResult:
    best_value: float
    best_parameters: list[float]
    evaluations: int
    converged: bool
    history: list[float] = field(default_factory=list)


class ObjectiveFunction:
    """Wraps fn(params) -> real.

    Called as f(params, grad) the gradient is written into `grad` in place,
    from the supplied `gradient` callable or by the parameter-shift rule.
    """

    def __init__(self, fn, dimension: int, gradient=None):
        self.fn = fn
        self.dimension = int(dimension)
        self.gradient = gradient

    def __call__(self, params, grad=None) -> float:
        params = [float(p) for p in params]
        value = float(self.fn(params))
        if grad is not None:
            g = self.gradient(params) if self.gradient else parameter_shift_gradient(self.fn, params)
            grad[:] = [float(v) for v in g]
        return value


class _BudgetExhausted(Exception):
    pass


class _Tracker:
    def __init__(self, f: ObjectiveFunction, maxeval: int):
        self.f = f
        self.maxeval = maxeval
        self.count = 0
        self.best_value = math.inf
        self.best_parameters: list[float] = []
        self.history: list[float] = []

    def __call__(self, x, grad=None) -> float:
        if self.count >= self.maxeval:
            raise _BudgetExhausted
        self.count += 1
        value = self.f(list(x), grad)
        if value < self.best_value:
            self.best_value = value
            self.best_parameters = [float(v) for v in x]
        self.history.append(self.best_value)
        return value

    def result(self, converged: bool) -> OptResult:
        return OptResult(self.best_value, self.best_parameters, self.count, converged, self.history)


class Optimizer:
    """Options: "maxeval", "ftol", "initial-parameters"; subclasses add their own."""

    def __init__(self):
        self.options = HetMap()

    def name(self) -> str:
        raise NotImplementedError

    def set_options(self, options):
        self.options = HetMap()
        for key, value in HetMap.coerce(options or {}).items():
            self.options.insert(_ALIASES.get(key, key), value)
        if "nlopt-optimizer" in self.options:
            logger.debug(f"{self.name()}: ignoring nlopt-optimizer={self.options['nlopt-optimizer']}")
        return self

    initialize = set_options

    def _real(self, key, default) -> float:
        try:
            return self.options.get_or(key, Variant.REAL, default)
        except VariantMismatch as e:
            raise BadOption(f"option '{key}': {e}") from None

    def _settings(self, dimension: int) -> tuple[int, float, np.ndarray]:
        try:
            maxeval = self.options.get_or("maxeval", Variant.INT, DEFAULT_MAXEVAL)
        except VariantMismatch as e:
            raise BadOption(f"option 'maxeval': {e}") from None
        if maxeval < 1:
            raise BadOption(f"maxeval must be at least 1, got {maxeval}")
        ftol = self._real("ftol", DEFAULT_FTOL)
        if ftol <= 0:
            raise BadOption(f"ftol must be positive, got {ftol}")
        try:
            x0 = self.options.get_or("initial-parameters", Variant.REALS, [0.0] * dimension)
        except VariantMismatch as e:
            raise BadOption(f"option 'initial-parameters': {e}") from None
        if len(x0) != dimension:
            raise BadOption(f"initial-parameters has {len(x0)} entries, objective takes {dimension}")
        return maxeval, ftol, np.array(x0, dtype=float)

    def optimize(self, f: ObjectiveFunction) -> OptResult:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.options!r})"


class NelderMead(Optimizer):
    """Reflection 1, expansion 2, contraction 1/2, shrink 1/2.

    Converged once the simplex's value spread is below "ftol" and its
    extent below "xtol". "initial-step" sets the initial simplex edge.
    """

    def name(self):
        return "neldermead"

    def optimize(self, f):
        maxeval, ftol, x0 = self._settings(f.dimension)
        xtol = self._real("xtol", DEFAULT_XTOL)
        edge = self._real("initial-step", DEFAULT_INITIAL_STEP)
        track = _Tracker(f, maxeval)
        converged = False
        try:
            simplex = [x0] + [x0 + edge * e for e in np.eye(x0.size)]
            values = [track(x) for x in simplex]
            while True:
                order = np.argsort(values, kind="stable")
                simplex = [simplex[i] for i in order]
                values = [values[i] for i in order]
                extent = max(np.max(np.abs(x - simplex[0])) for x in simplex[1:])
                if values[-1] - values[0] < ftol and extent < xtol:
                    converged = True
                    break

                centroid = np.mean(simplex[:-1], axis=0)
                worst = simplex[-1]
                xr = 2.0 * centroid - worst
                fr = track(xr)
                if values[0] <= fr < values[-2]:
                    simplex[-1], values[-1] = xr, fr
                    continue
                if fr < values[0]:
                    xe = 3.0 * centroid - 2.0 * worst
                    fe = track(xe)
                    simplex[-1], values[-1] = (xe, fe) if fe < fr else (xr, fr)
                    continue
                if fr < values[-1]:
                    xc = centroid + 0.5 * (xr - centroid)
                else:
                    xc = centroid + 0.5 * (worst - centroid)
                fc = track(xc)
                if fc < min(fr, values[-1]):
                    simplex[-1], values[-1] = xc, fc
                    continue
                for i in range(1, len(simplex)):
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    values[i] = track(simplex[i])
        except _BudgetExhausted:
            pass
        logger.debug(f"neldermead: {track.count} evaluation(s), best {track.best_value}, converged={converged}")
        return track.result(converged)


class GradientDescent(Optimizer):
    """x <- x - step * grad f(x); converged once |grad| < "ftol"."""

    def name(self):
        return "gd-paramshift"

    def optimize(self, f):
        maxeval, ftol, x = self._settings(f.dimension)
        step = self._real("step", DEFAULT_STEP)
        if step <= 0:
            raise BadOption(f"step must be positive, got {step}")
        track = _Tracker(f, maxeval)
        converged = False
        try:
            while True:
                grad = [0.0] * x.size
                track(x, grad)
                if np.linalg.norm(grad) < ftol:
                    converged = True
                    break
                x = x - step * np.asarray(grad)
        except _BudgetExhausted:
            pass
        logger.debug(f"gd-paramshift: {track.count} evaluation(s), best {track.best_value}, converged={converged}")
        return track.result(converged)
