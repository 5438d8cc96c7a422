"""Instruction catalog: gate definitions, unitaries and stock decompositions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from errors import ArityMismatch, UnknownInstruction

GATE = "gate"
MEASURE = "measure"
ANNEAL = "anneal"


@dataclass(frozen=True)
class GateDef:
    name: str
    n_qubits: int
    n_params: int
    builder: Optional[Callable[..., np.ndarray]] = None
    kind: str = GATE

    def unitary(self, *params) -> np.ndarray:
        if self.builder is None:
            raise UnknownInstruction(self.name)
        if len(params) != self.n_params:
            raise ArityMismatch(f"{self.name} takes {self.n_params} parameters, got {len(params)}")
        return self.builder(*(float(p) for p in params))


def _fixed(matrix):
    m = np.array(matrix, dtype=complex)
    m.setflags(write=False)
    return lambda: m


def _rx(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta):
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _u(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def _cphase(lam):
    return np.diag([1, 1, 1, np.exp(1j * lam)]).astype(complex)


_SQ2 = 1 / math.sqrt(2)

CATALOG: dict[str, GateDef] = {
    g.name: g
    for g in (
        GateDef("I", 1, 0, _fixed(np.eye(2))),
        GateDef("X", 1, 0, _fixed([[0, 1], [1, 0]])),
        GateDef("Y", 1, 0, _fixed([[0, -1j], [1j, 0]])),
        GateDef("Z", 1, 0, _fixed([[1, 0], [0, -1]])),
        GateDef("H", 1, 0, _fixed([[_SQ2, _SQ2], [_SQ2, -_SQ2]])),
        GateDef("S", 1, 0, _fixed([[1, 0], [0, 1j]])),
        GateDef("Sdg", 1, 0, _fixed([[1, 0], [0, -1j]])),
        GateDef("T", 1, 0, _fixed([[1, 0], [0, np.exp(0.25j * math.pi)]])),
        GateDef("Tdg", 1, 0, _fixed([[1, 0], [0, np.exp(-0.25j * math.pi)]])),
        GateDef("Rx", 1, 1, _rx),
        GateDef("Ry", 1, 1, _ry),
        GateDef("Rz", 1, 1, _rz),
        GateDef("U", 1, 3, _u),
        GateDef("CX", 2, 0, _fixed([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])),
        GateDef("CZ", 2, 0, _fixed(np.diag([1, 1, 1, -1]))),
        GateDef("CPhase", 2, 1, _cphase),
        GateDef("Swap", 2, 0, _fixed([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])),
        GateDef("Measure", 1, 0, None, MEASURE),
        GateDef("qmi", 2, 1, None, ANNEAL),
    )
}

_ALIASES = {name.lower(): name for name in CATALOG}
_ALIASES.update(
    {
        "cnot": "CX",
        "u3": "U",
        "cp": "CPhase",
        "cu1": "CPhase",
        "id": "I",
    }
)


def canonical_name(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise UnknownInstruction(name) from None


def lookup(name: str) -> GateDef:
    return CATALOG[canonical_name(name)]


def is_known(name: str) -> bool:
    return name.lower() in _ALIASES


def gate_unitary(name: str, params=()) -> np.ndarray:
    gate = lookup(name)
    if gate.kind != GATE:
        raise UnknownInstruction(name)
    return gate.unitary(*params)


# Rewrites used when a dialect has no spelling for a gate. Each rule maps
# (bits, params) to a list of (name, bits, params) in circuit order; the
# product equals the original gate up to global phase.
def _decompose_u(bits, params):
    theta, phi, lam = params
    return [("Rz", bits, [lam]), ("Ry", bits, [theta]), ("Rz", bits, [phi])]


DECOMPOSITIONS = {
    "U": _decompose_u,
    "Sdg": lambda bits, params: [("Rz", bits, [-math.pi / 2])],
    "Tdg": lambda bits, params: [("Rz", bits, [-math.pi / 4])],
}


def linspace(start: float, stop: float, num: int) -> list[float]:
    return [float(v) for v in np.linspace(start, stop, num)]
