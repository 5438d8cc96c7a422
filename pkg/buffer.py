"""Measurement results of one qubit register."""
from __future__ import annotations

import json
import sys

import numpy as np

from errors import EmptyBuffer, InvalidSize
from hetmap import HetMap, Variant


class QuantumBuffer:
    """Counts keyed by bitstring (leftmost character = qubit 0), a metadata
    HetMap and an ordered list of labeled child buffers."""

    def __init__(self, size: int, name: str = "qreg"):
        if int(size) < 1:
            raise InvalidSize(f"buffer size must be at least 1, got {size}")
        self.size = int(size)
        self.name = name
        self.counts: dict[str, int] = {}
        self.metadata = HetMap()
        self.children: list[tuple[str, QuantumBuffer]] = []

    def append_measurement(self, bitstring: str, count: int = 1):
        if len(bitstring) != self.size:
            raise ValueError(f"bitstring '{bitstring}' does not match buffer size {self.size}")
        self.counts[bitstring] = self.counts.get(bitstring, 0) + int(count)

    def set_counts(self, counts: dict):
        self.counts = {}
        for bits, n in sorted(counts.items()):
            self.append_measurement(bits, n)

    def measurement_counts(self) -> dict[str, int]:
        return dict(self.counts)

    def add_info(self, key: str, value):
        self.metadata.insert(key, value)

    def get_info(self, key: str, variant=None):
        if variant is None:
            return self.metadata[key]
        return self.metadata.get(key, variant)

    def append_child(self, label: str, child: "QuantumBuffer"):
        self.children.append((label, child))
        return child

    def get_children(self, label=None) -> list["QuantumBuffer"]:
        return [c for name, c in self.children if label is None or name == label]

    def n_children(self) -> int:
        return len(self.children)

    def n_shots(self) -> int:
        return sum(self.counts.values())

    def measured_bits(self) -> list[int]:
        """Bitstring positions holding measurement results; all when unrecorded."""
        for key in ("measured-bits", "measured-qubits"):
            measured = self.metadata.get_or(key, Variant.INTS, [])
            if measured:
                return measured
        return list(range(self.size))

    def expectation_value_z(self) -> float:
        """Parity average over the measured bits, or the exact-mode value."""
        if self.counts:
            qubits = self.measured_bits()
            total = self.n_shots()
            acc = 0
            for bits, n in self.counts.items():
                ones = sum(bits[q] == "1" for q in qubits)
                acc += -n if ones % 2 else n
            return acc / total
        if "exp-val-z" in self.metadata:
            return self.metadata.get("exp-val-z", Variant.REAL)
        raise EmptyBuffer(f"buffer '{self.name}' holds neither counts nor an exact expectation")

    def distribution(self) -> np.ndarray:
        """Probability of every basis state, index = bitstring read as binary."""
        if self.counts:
            probs = np.zeros(2**self.size)
            for bits, n in self.counts.items():
                probs[int(bits, 2)] += n
            return probs / probs.sum()
        if "probabilities" in self.metadata:
            return np.array(self.metadata.get("probabilities", Variant.REALS))
        raise EmptyBuffer(f"buffer '{self.name}' holds no distribution")

    def reset(self):
        self.counts = {}
        self.metadata = HetMap()
        self.children = []

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "size": self.size,
            "counts": dict(sorted(self.counts.items())),
            "metadata": self.metadata.to_json(),
            "children": [{"label": label, "buffer": child.to_json()} for label, child in self.children],
        }

    def dump(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def print(self, stream=None):
        print(self.dump(), file=stream or sys.stdout)

    def __getitem__(self, key):
        return self.metadata[key]

    def __contains__(self, key):
        return key in self.metadata

    def __repr__(self):
        return f"QuantumBuffer({self.name!r}, size={self.size}, shots={self.n_shots()}, children={len(self.children)})"


def qalloc(n: int, name: str = "qreg") -> QuantumBuffer:
    return QuantumBuffer(n, name)
