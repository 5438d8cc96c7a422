"""Hybrid algorithms: the variational eigensolver and data-driven circuit learning."""
from __future__ import annotations

import copy
import math

import numpy as np
from scipy.special import rel_entr

from buffer import QuantumBuffer
from errors import BadOption, DistributionLengthMismatch, InitializationError, LengthMismatch
from gradients import central_difference_gradient, parameter_shift_gradient
from hetmap import HetMap, Variant
from log import get_logger
from observable import FermionOperator, PauliOperator, jordan_wigner
from optimizers import ObjectiveFunction
from registry import get_service

logger = get_logger("algorithm")


def js_divergence(p, q) -> float:
    """Jensen-Shannon divergence with natural log; 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise LengthMismatch(f"distributions have lengths {p.size} and {q.size}")
    m = 0.5 * (p + q)
    return float(0.5 * np.sum(rel_entr(p, m)) + 0.5 * np.sum(rel_entr(q, m)))


def js_gradient_weights(p, q) -> np.ndarray:
    """dJSD/dp_k = log(p_k / m_k) / 2, taken as 0 where p_k = 0."""
    p = np.asarray(p, dtype=float)
    m = 0.5 * (p + np.asarray(q, dtype=float))
    weights = np.zeros_like(p)
    nonzero = p > 0
    weights[nonzero] = 0.5 * np.log(p[nonzero] / m[nonzero])
    return weights


class Algorithm:
    required: tuple = ()

    def __init__(self):
        self.options = HetMap()

    def name(self) -> str:
        raise NotImplementedError

    def initialize(self, options):
        options = HetMap.coerce(options or {})
        for key in self.required:
            if key not in options:
                raise InitializationError(key)
        self.options = options.copy()
        self.configure()
        return self

    def configure(self):
        pass

    def execute(self, buffer: QuantumBuffer):
        raise NotImplementedError

    def _service(self, kind, key):
        value = self.options[key]
        if isinstance(value, str):
            return get_service(kind, value)
        return value

    def _ansatz(self):
        ansatz = self.options["ansatz"]
        if not getattr(ansatz, "variables", None):
            raise InitializationError("ansatz", "ansatz has no variables")
        return ansatz


def _expectation(child: QuantumBuffer) -> float:
    if "exp-val" in child.metadata:
        return child.metadata.get("exp-val", Variant.REAL)
    return child.expectation_value_z()


class VQE(Algorithm):
    """Minimizes offset + sum_k c_k <P_k> over the ansatz variables.

    Every energy evaluation runs all term circuits in one batched execute and
    appends one child per term with "parameters", "term" and "exp-val".
    """

    required = ("ansatz", "observable", "accelerator", "optimizer")

    def name(self):
        return "vqe"

    def configure(self):
        self.ansatz = self._ansatz()
        observable = self.options["observable"]
        if isinstance(observable, str):
            observable = PauliOperator.from_string(observable)
        if isinstance(observable, FermionOperator):
            observable = jordan_wigner(observable)
        if not isinstance(observable, PauliOperator):
            raise InitializationError("observable", f"unsupported observable {type(observable).__name__}")
        self.observable = observable
        self.accelerator = self._service("accelerator", "accelerator")
        self.optimizer = self._service("optimizer", "optimizer")

    def energy_function(self, buffer: QuantumBuffer):
        offset = self.observable.identity_coefficient().real
        circuits = self.observable.observe(self.ansatz)

        def energy(x):
            scratch = QuantumBuffer(buffer.size, buffer.name)
            self.accelerator.execute(scratch, [c.evaluate(x) for c in circuits])
            total = offset
            for circuit, (label, child) in zip(circuits, scratch.children):
                value = _expectation(child)
                child.add_info("parameters", list(x))
                child.add_info("term", circuit.metadata["term"])
                child.add_info("exp-val", value)
                buffer.append_child(label, child)
                total += circuit.metadata["coefficient"] * value
            logger.debug(f"E({[round(v, 6) for v in x]}) = {total}")
            return total

        return energy

    def execute(self, buffer):
        energy = self.energy_function(buffer)
        result = self.optimizer.optimize(ObjectiveFunction(energy, len(self.ansatz.variables)))
        buffer.add_info("opt-val", result.best_value)
        buffer.add_info("opt-params", result.best_parameters)
        logger.info(f"opt-val {result.best_value} after {result.evaluations} evaluation(s)")
        return result


_DDCL_GRADIENTS = {
    "js-parameter-shift": parameter_shift_gradient,
    "js-central-difference": central_difference_gradient,
}


def _target(value) -> np.ndarray:
    if isinstance(value, str):
        try:
            value = [float(v) for v in value.replace(",", " ").split()]
        except ValueError:
            raise BadOption(f"target_dist is not a list of reals: {value!r}") from None
    target = np.asarray(value, dtype=float)
    if np.any(target < 0):
        raise BadOption("target_dist has negative entries")
    return target


class DDCL(Algorithm):
    """Trains the ansatz's output distribution toward "target_dist" by
    minimizing the Jensen-Shannon loss. Options "loss" ("js"), "gradient"
    ("js-parameter-shift" or "js-central-difference") and "seed" (random
    initial parameters when the optimizer has none)."""

    required = ("ansatz", "target_dist", "accelerator", "optimizer")

    def name(self):
        return "ddcl"

    def configure(self):
        self.ansatz = self._ansatz()
        self.accelerator = self._service("accelerator", "accelerator")
        self.optimizer = self._service("optimizer", "optimizer")
        loss = self.options.get_or("loss", Variant.TEXT, "js")
        if loss != "js":
            raise BadOption(f"unsupported loss '{loss}'")
        gradient = self.options.get_or("gradient", Variant.TEXT, "js-parameter-shift")
        if gradient not in _DDCL_GRADIENTS:
            raise BadOption(f"unsupported gradient '{gradient}'")
        self.gradient_rule = _DDCL_GRADIENTS[gradient]

    def __target(self, buffer) -> np.ndarray:
        target = _target(self.options["target_dist"])
        if target.size != 2**buffer.size:
            raise DistributionLengthMismatch(
                f"target_dist has {target.size} entries, a {buffer.size}-qubit buffer needs {2**buffer.size}"
            )
        total = target.sum()
        if total <= 0:
            raise BadOption("target_dist sums to zero")
        if abs(total - 1.0) > 1e-9:
            logger.warning(f"target_dist sums to {total}; normalizing")
            target = target / total
        return target

    def execute(self, buffer):
        target = self.__target(buffer)
        dimension = len(self.ansatz.variables)

        def distribution(x):
            scratch = QuantumBuffer(buffer.size, buffer.name)
            self.accelerator.execute(scratch, self.ansatz.evaluate(x))
            return scratch.distribution()

        def loss(x):
            return js_divergence(distribution(x), target)

        def gradient(x):
            weights = js_gradient_weights(distribution(x), target)
            jacobian = self.gradient_rule(distribution, x)
            return [float(np.dot(weights, row)) for row in jacobian]

        optimizer = self.optimizer
        if "initial-parameters" not in optimizer.options:
            rng = np.random.default_rng(self.options.get_or("seed", Variant.INT, None))
            optimizer = copy.copy(self.optimizer)
            optimizer.options = self.optimizer.options.copy()
            optimizer.options["initial-parameters"] = list(rng.uniform(-math.pi, math.pi, dimension))

        result = optimizer.optimize(ObjectiveFunction(loss, dimension, gradient))
        buffer.add_info("opt-val", result.best_value)
        buffer.add_info("opt-params", result.best_parameters)
        logger.info(f"opt-val {result.best_value} after {result.evaluations} evaluation(s)")
        return result
