"""Accelerator decorators: pass-through and readout-error mitigation."""
from __future__ import annotations

import numpy as np

from accelerator import AcceleratorDecorator
from errors import DegenerateChannel
from hetmap import Variant
from log import get_logger
from simulator import parity_signs, per_qubit

logger = get_logger("decorators")


class IdentityDecorator(AcceleratorDecorator):
    def name(self):
        return "identity"


def confusion_matrix(p01: float, p10: float) -> np.ndarray:
    """Column = prepared state, row = read state."""
    if p01 + p10 >= 1.0:
        raise DegenerateChannel(f"readout channel is not invertible: p01 + p10 = {p01 + p10}")
    return np.array([[1.0 - p01, p10], [p01, 1.0 - p10]])


def mitigated_parity(counts: dict, positions, p01, p10) -> float:
    """Z-parity of the listed bit positions after undoing independent
    per-bit readout flips with the inverse confusion matrix of each bit.

    For a single bit this reduces to (<Z>raw - (p10 - p01)) / (1 - p01 - p10).
    """
    m = len(positions)
    inverses = [np.linalg.inv(confusion_matrix(per_qubit(p01, q), per_qubit(p10, q))) for q in positions]
    raw = np.zeros([2] * m)
    for bits, n in counts.items():
        raw[tuple(int(bits[q]) for q in positions)] += n
    dist = raw / raw.sum()
    for axis, inverse in enumerate(inverses):
        dist = np.moveaxis(np.tensordot(inverse, dist, axes=([1], [axis])), 0, axis)
    return float(np.sum(dist * parity_signs(m, range(m))))


class ReadoutErrorDecorator(AcceleratorDecorator):
    """Writes the readout-corrected Z-parity expectation to metadata "exp-val".

    Flip probabilities come from the decorator options "p01"/"p10" when
    given, else from the wrapped accelerator's info properties.
    """

    def name(self):
        return "ro-error"

    def __probabilities(self, options):
        properties = self.info().properties
        found = []
        for key in ("p01", "p10"):
            if key in options:
                found.append(options[key])
            elif key in properties:
                found.append(properties[key])
            else:
                found.append(0.0)
        return found

    def post_process(self, buffer, options):
        if not buffer.counts:
            if "exp-val-z" in buffer.metadata:
                buffer.add_info("exp-val", buffer.metadata.get("exp-val-z", Variant.REAL))
            return
        p01, p10 = self.__probabilities(options)
        positions = buffer.measured_bits()
        value = mitigated_parity(buffer.counts, positions, p01, p10)
        buffer.add_info("exp-val", value)
        logger.debug(f"{buffer.name}: raw {buffer.expectation_value_z():.6f} -> corrected {value:.6f}")
