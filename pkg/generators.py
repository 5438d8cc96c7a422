"""Dynamic composites that populate themselves from options at expand time."""
from __future__ import annotations

import math

import gates
from errors import (
    ComplexCoefficient,
    EmptyOperator,
    KeyMissing,
    UnknownInstruction,
    VariantMismatch,
)
from hetmap import HetMap
from ir import CompositeNode, Symbol, create_instruction
from log import get_logger
from observable import FermionOperator, PauliOperator, jordan_wigner

logger = get_logger("generators")


class GeneratorComposite(CompositeNode):
    """Base for composites whose children come from `generate(options)`.

    Until `expand` succeeds the composite refuses evaluation.
    """

    generator_name = ""

    def __init__(self, name=None, variables=()):
        super().__init__(name or self.generator_name, variables)
        self.expanded = False
        self.options = HetMap()

    def generate(self, options: HetMap) -> list:
        raise NotImplementedError

    def expand(self, options=None) -> bool:
        options = HetMap.coerce(options or {})
        try:
            instructions = self.generate(options)
        except (KeyMissing, VariantMismatch, UnknownInstruction) as e:
            logger.warning(f"{self.generator_name}: cannot expand: {e}")
            return False
        if not instructions:
            logger.warning(f"{self.generator_name}: expansion produced no instructions")
            return False
        self.clear()
        self.add_instructions(instructions)
        self.options = options.copy()
        self.expanded = True
        return True

    def is_expanded_self(self) -> bool:
        return self.expanded

    def is_expanded(self) -> bool:
        return self.expanded and super().is_expanded()


def _qubit_range(options: HetMap) -> range:
    if "nq" in options:
        return range(0, options.get("nq", "int"))
    return range(options.get("start", "int"), options.get("end", "int"))


class RangeComposite(GeneratorComposite):
    """One single-qubit gate per qubit of `nq` or the half-open `[start, end)`."""

    generator_name = "range"

    def generate(self, options):
        gate = gates.lookup(options.get("gate", "text"))
        if gate.kind != gates.GATE or gate.n_qubits != 1 or gate.n_params != 0:
            logger.warning(f"range: '{gate.name}' is not a parameter-free single-qubit gate")
            return []
        return [create_instruction(gate.name, [q]) for q in _qubit_range(options)]


class QftComposite(GeneratorComposite):
    """Textbook QFT with the lowest index as most significant qubit.

    The trailing swap network makes the unitary equal the DFT matrix.
    """

    generator_name = "qft"

    def generate(self, options):
        qubits = list(_qubit_range(options))
        n = len(qubits)
        out = []
        for j in range(n):
            out.append(create_instruction("H", [qubits[j]]))
            for k in range(j + 1, n):
                out.append(create_instruction("CPhase", [qubits[k], qubits[j]], [math.pi / 2 ** (k - j)]))
        for i in range(n // 2):
            out.append(create_instruction("Swap", [qubits[i], qubits[n - 1 - i]]))
        return out


class ExpIThetaComposite(GeneratorComposite):
    """First-order product of exp(i*theta*c*P) over the operator's terms.

    Each term: basis change, CX ladder onto its highest site, Rz(-2*c*theta),
    then the ladder and basis change undone.
    """

    generator_name = "exp_i_theta"

    def _operator(self, options) -> PauliOperator:
        if "pauli" in options:
            return PauliOperator.from_string(options.get("pauli", "text"))
        if "fermion" in options:
            return jordan_wigner(FermionOperator.from_string(options.get("fermion", "text")))
        raise KeyMissing("pauli")

    def generate(self, options):
        op = self._operator(options)
        if "variable" in options:
            variable = options.get("variable", "text")
        elif self.variables:
            variable = self.variables[0]
        else:
            variable = "theta"
        terms = op.non_identity_terms()
        if not terms:
            raise EmptyOperator("exp_i_theta needs at least one non-identity term")
        for key, coeff in terms:
            if abs(coeff.imag) > 1e-12:
                raise ComplexCoefficient(f"term {key} has complex coefficient {coeff}")
        self.variables = [variable]

        out = []
        for key, coeff in terms:
            sites = [site for site, _ in key]
            to_z, from_z = [], []
            for site, pauli in key:
                if pauli == "X":
                    to_z.append(create_instruction("H", [site]))
                    from_z.append(create_instruction("H", [site]))
                elif pauli == "Y":
                    to_z.append(create_instruction("Rx", [site], [math.pi / 2]))
                    from_z.append(create_instruction("Rx", [site], [-math.pi / 2]))
            ladder = [create_instruction("CX", [a, b]) for a, b in zip(sites, sites[1:])]
            out.extend(to_z)
            out.extend(ladder)
            out.append(create_instruction("Rz", [sites[-1]], [Symbol.affine(variable, -2.0 * coeff.real)]))
            out.extend(reversed([inst.copy() for inst in ladder]))
            out.extend(from_z)
        return out


GENERATORS = {
    cls.generator_name: cls for cls in (RangeComposite, QftComposite, ExpIThetaComposite)
}
