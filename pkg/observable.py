"""Pauli and fermionic operators, their string grammars, measurement-circuit
generation and the Jordan-Wigner mapping."""
from __future__ import annotations

import math
import re
from functools import reduce
from typing import Iterator

import numpy as np

from config import PRUNE_TOLERANCE
from errors import AlreadyMeasured, EmptyCounts, ParseError, SymbolicProgram
from ir import CompositeNode, create_instruction

PauliKey = tuple  # ((site, "X"|"Y"|"Z"), ...) sites strictly ascending
FermionKey = tuple  # ((site, is_creation), ...) in listed order

_PRODUCT = {
    ("X", "Y"): (1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("Y", "X"): (-1j, "Z"),
    ("Z", "Y"): (-1j, "X"),
    ("X", "Z"): (-1j, "Y"),
}

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_REAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_COMPLEX = rf"\(\s*[-+]?{_REAL}\s*,\s*[-+]?{_REAL}\s*\)"


def _parse_complex(text: str) -> complex:
    re_part, im_part = text.strip("() ").split(",")
    return complex(float(re_part), float(im_part))


def _parse_number(text: str) -> complex:
    if text[-1] in "ij":
        return complex(0.0, float(text[:-1]))
    return complex(float(text))


def _tokenize(text: str, spec: re.Pattern) -> list[tuple[str, str, int]]:
    text = text.replace("−", "-")
    tokens = []
    pos = 0
    while pos < len(text):
        m = spec.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", 1, pos + 1)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return tokens


def _format_coefficient(coeff: complex) -> str:
    if abs(coeff.imag) <= PRUNE_TOLERANCE:
        return repr(coeff.real)
    return f"({coeff.real!r}, {coeff.imag!r})"


def _join_terms(rendered: list[tuple[complex, str]]) -> str:
    out = ""
    for i, (coeff, body) in enumerate(rendered):
        if abs(coeff.imag) <= PRUNE_TOLERANCE and coeff.real < 0:
            sign, text = "-", _format_coefficient(complex(-coeff.real))
        else:
            sign, text = "+", _format_coefficient(coeff)
        piece = f"{text} {body}".strip()
        if i == 0:
            out = piece if sign == "+" else f"-{piece}"
        else:
            out += f" {sign} {piece}"
    return out


def canonical_pauli_key(key) -> PauliKey:
    if isinstance(key, dict):
        key = key.items()
    sites = {}
    for site, op in key:
        op = op.upper()
        if op == "I":
            continue
        if op not in "XYZ" or int(site) in sites:
            raise ValueError(f"invalid Pauli key {key!r}")
        sites[int(site)] = op
    return tuple(sorted(sites.items()))


def key_label(key: PauliKey) -> str:
    return "".join(f"{op}{site}" for site, op in key) or "I"


def multiply_keys(a: PauliKey, b: PauliKey) -> tuple[complex, PauliKey]:
    sites = dict(a)
    phase = 1 + 0j
    for site, op in b:
        current = sites.get(site)
        if current is None:
            sites[site] = op
        elif current == op:
            del sites[site]
        else:
            factor, result = _PRODUCT[(current, op)]
            phase *= factor
            sites[site] = result
    return phase, tuple(sorted(sites.items()))


class PauliOperator:
    """Weighted sum of Pauli strings (SpinOperator)."""

    def __init__(self, terms=None, variables=None):
        self._terms: dict[PauliKey, complex] = {}
        self._variables: dict[PauliKey, str] = {}
        for key, coeff in dict(terms or {}).items():
            self._accumulate(canonical_pauli_key(key), complex(coeff))
        for key, var in dict(variables or {}).items():
            self._variables[canonical_pauli_key(key)] = var
        self._prune()

    def _accumulate(self, key, coeff):
        self._terms[key] = self._terms.get(key, 0j) + coeff

    def _prune(self):
        for key in [k for k, c in self._terms.items() if abs(c) < PRUNE_TOLERANCE]:
            if key not in self._variables:
                del self._terms[key]

    @classmethod
    def from_term(cls, key, coeff=1.0, variable=None) -> "PauliOperator":
        key = canonical_pauli_key(key)
        return cls({key: coeff}, {key: variable} if variable else None)

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        return _parse_pauli(text)

    @classmethod
    def identity(cls, coeff=1.0) -> "PauliOperator":
        return cls({(): coeff})

    def name(self) -> str:
        return "pauli"

    def items(self) -> Iterator[tuple[PauliKey, complex]]:
        return iter(list(self._terms.items()))

    def keys(self) -> list[PauliKey]:
        return list(self._terms)

    def coefficient(self, key) -> complex:
        return self._terms.get(canonical_pauli_key(key), 0j)

    def variable(self, key):
        return self._variables.get(canonical_pauli_key(key))

    def identity_coefficient(self) -> complex:
        return self._terms.get((), 0j)

    def non_identity_terms(self) -> list[tuple[PauliKey, complex]]:
        return [(k, c) for k, c in self._terms.items() if k]

    def n_qubits(self) -> int:
        return max((site + 1 for key in self._terms for site, _ in key), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def _combine(self, other, sign):
        result = PauliOperator()
        result._terms = dict(self._terms)
        result._variables = dict(self._variables)
        for key, coeff in other._terms.items():
            result._accumulate(key, sign * coeff)
        result._variables.update(other._variables)
        result._prune()
        return result

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PauliOperator.identity(other)
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PauliOperator.identity(other)
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.scale(-1)

    def scale(self, factor) -> "PauliOperator":
        result = PauliOperator()
        result._terms = {k: c * factor for k, c in self._terms.items()}
        result._variables = dict(self._variables)
        result._prune()
        return result

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        if not isinstance(other, PauliOperator):
            return NotImplemented
        result = PauliOperator()
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                phase, key = multiply_keys(ka, kb)
                result._accumulate(key, phase * ca * cb)
        result._prune()
        return result

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, PauliOperator):
            return NotImplemented
        keys = set(self._terms) | set(other._terms)
        return all(
            abs(self._terms.get(k, 0j) - other._terms.get(k, 0j)) < PRUNE_TOLERANCE for k in keys
        )

    def __len__(self):
        return len(self._terms)

    def __str__(self):
        return _join_terms([(c, " ".join(f"{op}{site}" for site, op in k)) for k, c in self._terms.items()])

    def __repr__(self):
        return f"PauliOperator({str(self) or '0'})"

    def to_matrix(self, n_qubits=None) -> np.ndarray:
        """Dense matrix with qubit 0 as the leftmost Kronecker factor."""
        n = n_qubits if n_qubits is not None else max(self.n_qubits(), 1)
        total = np.zeros((2**n, 2**n), dtype=complex)
        for key, coeff in self._terms.items():
            sites = dict(key)
            factors = [_PAULI_MATRICES[sites.get(q, "I")] for q in range(n)]
            total += coeff * reduce(np.kron, factors)
        return total

    def observe(self, composite: CompositeNode) -> list[CompositeNode]:
        """One measured copy of `composite` per non-identity term.

        X sites get H, Y sites get Rx(pi/2), then every site of the term is
        measured. The term label and real coefficient go into metadata.
        """
        if any(leaf.is_measure for leaf in composite.leaves(enabled_only=False)):
            raise AlreadyMeasured(f"composite '{composite.name}' already contains measurements")
        if self._variables:
            raise SymbolicProgram("observe() needs concrete term coefficients")
        measured = []
        for key, coeff in self.non_identity_terms():
            label = key_label(key)
            circuit = CompositeNode(f"{composite.name}_{label}", composite.variables)
            circuit.add_instruction(composite.copy())
            for site, op in key:
                if op == "X":
                    circuit.add_instruction(create_instruction("H", [site]))
                elif op == "Y":
                    circuit.add_instruction(create_instruction("Rx", [site], [math.pi / 2]))
            for site, _ in key:
                circuit.add_instruction(create_instruction("Measure", [site]))
            circuit.metadata["term"] = label
            circuit.metadata["coefficient"] = coeff.real
            measured.append(circuit)
        return measured


_PAULI_TOKENS = re.compile(
    rf"(?P<ws>\s+)|(?P<complex>{_COMPLEX})|(?P<number>{_REAL}[ij]?)"
    r"|(?P<pauli>[XYZ]\d+)|(?P<identity>I\d*)|(?P<sign>[-+])|(?P<star>\*)"
)


def _parse_pauli(text: str) -> PauliOperator:
    tokens = _tokenize(text, _PAULI_TOKENS)
    result = PauliOperator()
    i = 0
    first = True
    while i < len(tokens):
        sign = 1
        if tokens[i][0] == "sign":
            sign = -1 if tokens[i][1] == "-" else 1
            i += 1
        elif not first:
            kind, tok, col = tokens[i]
            raise ParseError(f"expected '+' or '-' before {tok!r}", 1, col)
        first = False
        coeff = None
        key: PauliKey = ()
        phase = 1 + 0j
        seen_operator = False
        if i < len(tokens) and tokens[i][0] in ("number", "complex"):
            kind, tok, _ = tokens[i]
            coeff = _parse_complex(tok) if kind == "complex" else _parse_number(tok)
            i += 1
            if i < len(tokens) and tokens[i][0] == "star":
                i += 1
        while i < len(tokens) and tokens[i][0] in ("pauli", "identity"):
            kind, tok, _ = tokens[i]
            seen_operator = True
            if kind == "pauli":
                factor, key = multiply_keys(key, ((int(tok[1:]), tok[0]),))
                phase *= factor
            i += 1
        if coeff is None and not seen_operator:
            col = tokens[i][2] if i < len(tokens) else len(text) + 1
            raise ParseError("expected a coefficient or Pauli term", 1, col)
        result._accumulate(key, sign * phase * (1.0 if coeff is None else coeff))
    result._prune()
    return result


def expectation_from_counts(counts: dict, sites) -> float:
    """Parity average over `sites`; leftmost bitstring character is qubit 0."""
    total = sum(counts.values())
    if total <= 0:
        raise EmptyCounts("no shots recorded")
    acc = 0
    for bits, n in counts.items():
        ones = sum(1 for s in sites if bits[s] == "1")
        acc += -n if ones % 2 else n
    return acc / total


class FermionOperator:
    """Sums of ladder-operator products; products keep their listed order."""

    def __init__(self, terms=None):
        self._terms: dict[FermionKey, complex] = {}
        for key, coeff in dict(terms or {}).items():
            key = tuple((int(site), bool(creation)) for site, creation in key)
            self._terms[key] = self._terms.get(key, 0j) + complex(coeff)
        self._prune()

    def _prune(self):
        self._terms = {k: c for k, c in self._terms.items() if abs(c) >= PRUNE_TOLERANCE}

    @classmethod
    def from_string(cls, text: str) -> "FermionOperator":
        return _parse_fermion(text)

    def name(self) -> str:
        return "fermion"

    def items(self) -> Iterator[tuple[FermionKey, complex]]:
        return iter(list(self._terms.items()))

    def n_modes(self) -> int:
        return max((site + 1 for key in self._terms for site, _ in key), default=0)

    def n_qubits(self) -> int:
        return self.n_modes()

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other):
        if not isinstance(other, FermionOperator):
            return NotImplemented
        merged = dict(self._terms)
        for key, coeff in other._terms.items():
            merged[key] = merged.get(key, 0j) + coeff
        return FermionOperator(merged)

    def __sub__(self, other):
        if not isinstance(other, FermionOperator):
            return NotImplemented
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, factor) -> "FermionOperator":
        return FermionOperator({k: c * factor for k, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        if not isinstance(other, FermionOperator):
            return NotImplemented
        product = {}
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                product[ka + kb] = product.get(ka + kb, 0j) + ca * cb
        return FermionOperator(product)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def hermitian_conjugate(self) -> "FermionOperator":
        return FermionOperator(
            {tuple((s, not c) for s, c in reversed(k)): coeff.conjugate() for k, coeff in self._terms.items()}
        )

    def __eq__(self, other):
        if not isinstance(other, FermionOperator):
            return NotImplemented
        keys = set(self._terms) | set(other._terms)
        return all(
            abs(self._terms.get(k, 0j) - other._terms.get(k, 0j)) < PRUNE_TOLERANCE for k in keys
        )

    def __len__(self):
        return len(self._terms)

    def __str__(self):
        return _join_terms(
            [(c, " ".join(f"{s}^" if cr else f"{s}" for s, cr in k)) for k, c in self._terms.items()]
        )

    def __repr__(self):
        return f"FermionOperator({str(self) or '0'})"

    def observe(self, composite: CompositeNode) -> list[CompositeNode]:
        return jordan_wigner(self).observe(composite)


# Bare integers are always mode indices; coefficients need a decimal point,
# an exponent or an imaginary suffix.
_FERMION_COEFF = r"(?:\d+\.\d*|\.\d+)(?:[eE][-+]?\d+)?[ij]?|\d+[eE][-+]?\d+[ij]?|\d+[ij]"
_FERMION_TOKENS = re.compile(
    rf"(?P<ws>\s+)|(?P<complex>{_COMPLEX})|(?P<number>{_FERMION_COEFF})"
    r"|(?P<ladder>\d+\^?(?![\^\d]))|(?P<sign>[-+])|(?P<star>\*)"
)


def _parse_fermion(text: str) -> FermionOperator:
    tokens = _tokenize(text, _FERMION_TOKENS)
    terms: dict[FermionKey, complex] = {}
    i = 0
    first = True
    while i < len(tokens):
        sign = 1
        if tokens[i][0] == "sign":
            sign = -1 if tokens[i][1] == "-" else 1
            i += 1
        elif not first:
            raise ParseError(f"expected '+' or '-' before {tokens[i][1]!r}", 1, tokens[i][2])
        first = False
        coeff = None
        if i < len(tokens) and tokens[i][0] in ("number", "complex"):
            kind, tok, _ = tokens[i]
            coeff = _parse_complex(tok) if kind == "complex" else _parse_number(tok)
            i += 1
            if i < len(tokens) and tokens[i][0] == "star":
                i += 1
        key = []
        while i < len(tokens) and tokens[i][0] == "ladder":
            tok = tokens[i][1]
            key.append((int(tok.rstrip("^")), tok.endswith("^")))
            i += 1
        if coeff is None and not key:
            col = tokens[i][2] if i < len(tokens) else len(text) + 1
            raise ParseError("expected a coefficient or ladder operator", 1, col)
        key = tuple(key)
        terms[key] = terms.get(key, 0j) + sign * (1.0 if coeff is None else coeff)
    return FermionOperator(terms)


def _ladder(site: int, creation: bool) -> PauliOperator:
    z_string = tuple((q, "Z") for q in range(site))
    return PauliOperator(
        {
            z_string + ((site, "X"),): 0.5,
            z_string + ((site, "Y"),): -0.5j if creation else 0.5j,
        }
    )


def jordan_wigner(fermion: FermionOperator) -> PauliOperator:
    """a+_p -> Z_0..Z_{p-1} (X_p - iY_p)/2 and a_p -> Z_0..Z_{p-1} (X_p + iY_p)/2."""
    result = PauliOperator()
    for key, coeff in fermion.items():
        term = PauliOperator.identity(coeff)
        for site, creation in key:
            term = term * _ladder(site, creation)
        result = result + term
    return result


class JordanWignerTransform:
    def name(self) -> str:
        return "jordan-wigner"

    def transform(self, observable):
        if isinstance(observable, FermionOperator):
            return jordan_wigner(observable)
        if isinstance(observable, PauliOperator):
            return observable
        raise TypeError(f"cannot map {type(observable).__name__} with jordan-wigner")
