"""Dense statevector simulator.

The state is kept as a rank-n tensor of shape [2]*n with axis q = qubit q,
so qubit 0 is the most significant bit of a flattened basis index and the
leftmost character of a bitstring. Gates are applied by contracting their
unitary against the target axes.
"""
from __future__ import annotations

import numpy as np

import gates
from accelerator import Accelerator, AcceleratorInfo
from config import MAX_QUBITS, STATEVECTOR_QUBITS
from errors import BadOption, InvalidSize, MixedModelProgram, QubitOutOfRange, SymbolicProgram, UnexpandedComposite
from hetmap import HetMap, Variant
from ir import CompositeNode
from log import get_logger

logger = get_logger("sim")


def zero_state(n: int) -> np.ndarray:
    state = np.zeros([2] * n, dtype=complex)
    state[(0,) * n] = 1.0
    return state


def apply_gate(state: np.ndarray, matrix: np.ndarray, bits) -> np.ndarray:
    """Contract a 2^k x 2^k unitary into the axes `bits` of `state`.

    Trailing axes beyond the qubit axes are carried along untouched, which
    lets the same routine act on a batch of column vectors.
    """
    k = len(bits)
    tensor = matrix.reshape([2] * (2 * k))
    state = np.tensordot(tensor, state, axes=(list(range(k, 2 * k)), list(bits)))
    return np.moveaxis(state, list(range(k)), list(bits))


def _first_unexpanded(node: CompositeNode):
    if not node.is_expanded_self():
        return node.name
    for child in node:
        if isinstance(child, CompositeNode):
            found = _first_unexpanded(child)
            if found:
                return found
    return None


def concrete_leaves(composite: CompositeNode) -> list:
    """Enabled leaves of a fully expanded, fully bound composite."""
    unexpanded = _first_unexpanded(composite)
    if unexpanded:
        raise UnexpandedComposite(unexpanded)
    leaves = list(composite.leaves())
    free = sorted({s for leaf in leaves for s in leaf.symbols()})
    if free:
        raise SymbolicProgram(f"composite '{composite.name}' has unbound variables {free}")
    return leaves


def _matrix(leaf) -> np.ndarray:
    return gates.gate_unitary(leaf.name, [p.to_float() for p in leaf.params])


def _compiled(leaves) -> list:
    """(leaf, unitary or None for Measure) in program order."""
    ops = []
    for leaf in leaves:
        if leaf.is_anneal:
            raise MixedModelProgram(f"gate simulator cannot run annealing instruction {leaf!r}")
        ops.append((leaf, None if leaf.is_measure else _matrix(leaf)))
    return ops


def circuit_unitary(composite: CompositeNode, n: int | None = None) -> np.ndarray:
    """Dense unitary of an evaluated composite; Measure is ignored."""
    ops = _compiled(concrete_leaves(composite))
    n = n or max(composite.max_qubit() + 1, 1)
    if composite.max_qubit() >= n:
        raise QubitOutOfRange(f"composite '{composite.name}' addresses qubit {composite.max_qubit()} of {n}")
    dim = 2**n
    u = np.eye(dim, dtype=complex).reshape([2] * n + [dim])
    for leaf, matrix in ops:
        if matrix is not None:
            u = apply_gate(u, matrix, leaf.bits)
    return u.reshape(dim, dim)


def parity_signs(n: int, qubits) -> np.ndarray:
    """(-1)^(sum of the listed qubits' bits) over the [2]*n basis tensor."""
    signs = np.ones([2] * n)
    for q in qubits:
        shape = [1] * n
        shape[q] = 2
        signs = signs * np.array([1.0, -1.0]).reshape(shape)
    return signs


def per_qubit(value, q: int) -> float:
    if value is None:
        return 0.0
    if isinstance(value, (list, tuple)):
        return float(value[q]) if q < len(value) else 0.0
    return float(value)


def _collapse(state: np.ndarray, qubit: int, rng) -> tuple[np.ndarray, int]:
    p1 = float(np.sum(np.abs(np.take(state, 1, axis=qubit)) ** 2))
    bit = int(rng.random() < p1)
    index = [slice(None)] * state.ndim
    index[qubit] = 1 - bit
    state = state.copy()
    state[tuple(index)] = 0.0
    return state / np.linalg.norm(state), bit


def _has_midcircuit_measure(leaves) -> bool:
    measured = set()
    for leaf in leaves:
        if leaf.is_measure:
            measured.add(leaf.bits[0])
        elif measured.intersection(leaf.bits):
            return True
    return False


class StatevectorSimulator(Accelerator):
    """Options: "shots" (0 or absent = exact mode), "seed", "connectivity",
    "readout-p01"/"readout-p10" (a real, or one real per qubit)."""

    def name(self):
        return "sim"

    def info(self) -> AcceleratorInfo:
        properties = HetMap()
        for option, prop in (("readout-p01", "p01"), ("readout-p10", "p10")):
            if option in self.options:
                properties[prop] = self.options[option]
        return AcceleratorInfo(self.name(), self.get_connectivity(), properties)

    def execute_one(self, buffer, composite, options):
        leaves = concrete_leaves(composite)
        ops = _compiled(leaves)
        n = buffer.size
        if n > MAX_QUBITS:
            raise InvalidSize(f"simulator supports at most {MAX_QUBITS} qubits, buffer has {n}")
        for leaf in leaves:
            targets = leaf.bits + (leaf.classical_targets() if leaf.is_measure else [])
            if max(targets) >= n:
                raise QubitOutOfRange(f"{leaf!r} addresses index {max(targets)} on a {n}-qubit buffer")

        shots = options.get_or("shots", Variant.INT, 0)
        if shots < 0:
            raise BadOption(f"shots must be non-negative, got {shots}")
        pairs = list(dict.fromkeys((leaf.bits[0], leaf.classical_targets()[0]) for leaf in leaves if leaf.is_measure))
        if shots == 0:
            self.__exact(buffer, ops, pairs)
        else:
            self.__sampled(buffer, ops, pairs, shots, options)
        logger.debug(f"{composite.name}: {len(ops)} instruction(s) on {n} qubit(s), shots={shots}")

    def __evolve(self, n, ops) -> np.ndarray:
        state = zero_state(n)
        for leaf, matrix in ops:
            if matrix is not None:
                state = apply_gate(state, matrix, leaf.bits)
        return state

    def __exact(self, buffer, ops, pairs):
        n = buffer.size
        state = self.__evolve(n, ops)
        probs = np.abs(state) ** 2
        qubits = list(dict.fromkeys(q for q, _ in pairs)) or list(range(n))
        buffer.add_info("exp-val-z", float(np.sum(probs * parity_signs(n, qubits))))
        buffer.add_info("measured-qubits", qubits)
        if n <= STATEVECTOR_QUBITS:
            buffer.add_info("probabilities", [float(p) for p in probs.reshape(-1)])
            buffer.add_info("statevector", state.reshape(-1).copy())

    def __sampled(self, buffer, ops, pairs, shots, options):
        n = buffer.size
        rng = np.random.default_rng(options.get_or("seed", Variant.INT, None))
        if _has_midcircuit_measure(leaf for leaf, _ in ops):
            records = self.__trajectories(n, ops, shots, rng)
        else:
            pairs = pairs or [(q, q) for q in range(n)]
            records = self.__final_samples(n, ops, pairs, shots, rng)

        p01 = options["readout-p01"] if "readout-p01" in options else None
        p10 = options["readout-p10"] if "readout-p10" in options else None
        if p01 is not None or p10 is not None:
            for q, c in pairs:
                draw = rng.random(shots)
                column = records[:, c]
                flip = np.where(column == 0, draw < per_qubit(p01, q), draw < per_qubit(p10, q))
                records[:, c] = column ^ flip

        rows, tallies = np.unique(records, axis=0, return_counts=True)
        buffer.set_counts({"".join(str(int(b)) for b in row): int(t) for row, t in zip(rows, tallies)})
        buffer.add_info("shots", shots)
        buffer.add_info("measured-qubits", [q for q, _ in pairs])
        buffer.add_info("measured-bits", [c for _, c in pairs])

    def __final_samples(self, n, ops, pairs, shots, rng) -> np.ndarray:
        probs = np.abs(self.__evolve(n, ops)) ** 2
        qubits = list(dict.fromkeys(q for q, _ in pairs))
        rest = tuple(q for q in range(n) if q not in qubits)
        marginal = probs.sum(axis=rest) if rest else probs
        order = sorted(qubits)
        marginal = np.transpose(marginal, [order.index(q) for q in qubits]).reshape(-1)
        marginal = marginal / marginal.sum()

        draws = rng.multinomial(shots, marginal)
        outcomes = np.repeat(np.arange(marginal.size), draws)
        m = len(qubits)
        values = (outcomes[:, None] >> np.arange(m - 1, -1, -1)) & 1
        column = {q: j for j, q in enumerate(qubits)}
        records = np.zeros((shots, n), dtype=np.int8)
        for q, c in pairs:
            records[:, c] = values[:, column[q]]
        return records

    def __trajectories(self, n, ops, shots, rng) -> np.ndarray:
        records = np.zeros((shots, n), dtype=np.int8)
        for shot in range(shots):
            state = zero_state(n)
            for leaf, matrix in ops:
                if matrix is None:
                    state, bit = _collapse(state, leaf.bits[0], rng)
                    records[shot, leaf.classical_targets()[0]] = bit
                else:
                    state = apply_gate(state, matrix, leaf.bits)
        return records
