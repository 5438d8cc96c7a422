"""Exact Ising ground-state solver for qmi programs."""
from __future__ import annotations

import numpy as np

from accelerator import Accelerator
from config import MAX_ANNEAL_SPINS
from errors import InvalidSize, MixedModelProgram, QubitOutOfRange
from log import get_logger
from simulator import concrete_leaves

logger = get_logger("anneal")

ENERGY_TOLERANCE = 1e-9


def ising_terms(leaves, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Fields h (qmi(i, i, w)) and upper-triangular couplings J (qmi(i, j, w))."""
    h = np.zeros(n)
    j = np.zeros((n, n))
    for leaf in leaves:
        a, b = leaf.bits
        weight = leaf.params[0].to_float()
        if a == b:
            h[a] += weight
        else:
            j[min(a, b), max(a, b)] += weight
    return h, j


def spin_configurations(n: int) -> np.ndarray:
    """Every spin vector in bitstring order; bit '1' is spin +1."""
    bits = (np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return 2 * bits - 1


def energies(h: np.ndarray, j: np.ndarray) -> np.ndarray:
    s = spin_configurations(len(h))
    return s @ h + np.einsum("ci,ij,cj->c", s, j, s)


class AnnealingSolver(Accelerator):
    """Enumerates H(s) = sum h_i s_i + sum J_ij s_i s_j over all spins.

    Writes "ground-energy" and one count per degenerate minimum.
    """

    def name(self):
        return "anneal"

    def execute_one(self, buffer, composite, options):
        leaves = concrete_leaves(composite)
        gate_leaves = [leaf for leaf in leaves if not leaf.is_anneal]
        if gate_leaves:
            raise MixedModelProgram(f"annealer cannot run gate instruction {gate_leaves[0]!r}")
        n = buffer.size
        if n > MAX_ANNEAL_SPINS:
            raise InvalidSize(f"exact annealing supports at most {MAX_ANNEAL_SPINS} spins, buffer has {n}")
        if composite.max_qubit() >= n:
            raise QubitOutOfRange(f"program addresses spin {composite.max_qubit()} on a {n}-spin buffer")

        h, j = ising_terms(leaves, n)
        e = energies(h, j)
        ground = float(e.min())
        minima = np.flatnonzero(e <= ground + ENERGY_TOLERANCE)
        buffer.set_counts({format(int(i), f"0{n}b"): 1 for i in minima})
        buffer.add_info("ground-energy", ground)
        logger.debug(f"{composite.name}: ground energy {ground} with {len(minima)} degenerate state(s)")
