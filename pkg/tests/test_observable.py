import math
from functools import reduce

import numpy as np
import pytest

import api
from buffer import QuantumBuffer
from conftest import ANSATZ_QUIL, H3, H3_ANSATZ
from errors import AlreadyMeasured, EmptyCounts, ParseError
from ir import CompositeNode, create_instruction
from observable import FermionOperator, PauliOperator, expectation_from_counts, jordan_wigner
from quil import QuilCompiler
from simulator import StatevectorSimulator

I2 = np.eye(2, dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)


def annihilator(p, n):
    return reduce(np.kron, [Z] * p + [LOWER] + [I2] * (n - p - 1))


def brute_force(fermion: FermionOperator, n):
    total = np.zeros((2**n, 2**n), dtype=complex)
    for key, coeff in fermion.items():
        term = np.eye(2**n, dtype=complex)
        for site, creation in key:
            a = annihilator(site, n)
            term = term @ (a.conj().T if creation else a)
        total += coeff * term
    return total


def random_pauli(rng, n, n_terms=2):
    terms = {}
    for _ in range(n_terms):
        key = tuple((q, "XYZ"[rng.integers(3)]) for q in range(n) if rng.random() < 0.6)
        terms[key] = complex(rng.normal(), rng.normal())
    return PauliOperator(terms)


def random_fermion(rng, n, n_terms=3):
    terms = {}
    for _ in range(n_terms):
        length = int(rng.integers(1, 4))
        key = tuple((int(rng.integers(n)), bool(rng.random() < 0.5)) for _ in range(length))
        terms[key] = complex(rng.normal(), rng.normal())
    return FermionOperator(terms)


class TestPauliParsing:
    def test_spaced_product(self):
        op = PauliOperator.from_string("X0 X1")
        assert op.keys() == [((0, "X"), (1, "X"))]
        assert op.coefficient([(0, "X"), (1, "X")]) == 1

    def test_h3_coefficients(self):
        op = PauliOperator.from_string(H3)
        assert len(op) == 8
        assert op.identity_coefficient() == pytest.approx(15.531709)
        expected = {
            "X0X1": -2.1433,
            "Y0Y1": -2.1433,
            "Z0": 0.21829,
            "Z1": -6.125,
            "Z2": -9.625,
            "X1X2": -3.91,
            "Y1Y2": -3.91,
        }
        for label, coeff in expected.items():
            key = [(int(label[i + 1]), label[i]) for i in range(0, len(label), 2)]
            assert op.coefficient(key) == pytest.approx(coeff)
        assert op.n_qubits() == 3

    def test_h3_ground_state(self):
        m = PauliOperator.from_string(H3).to_matrix(3)
        assert np.allclose(m, m.conj().T)
        assert np.linalg.eigvalsh(m)[0] == pytest.approx(-2.04, abs=0.02)

    def test_complex_and_imaginary_coefficients(self):
        op = PauliOperator.from_string("(0.5, -1.0) Z0 + 2j X1")
        assert op.coefficient([(0, "Z")]) == complex(0.5, -1.0)
        assert op.coefficient([(1, "X")]) == 2j

    def test_empty_is_zero(self):
        assert PauliOperator.from_string("").is_zero()

    @pytest.mark.parametrize("text", ["X0 Q1", "X0 2.0 X1", "+", "X0 +"])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            PauliOperator.from_string(text)

    def test_text_round_trip(self):
        op = PauliOperator.from_string(H3)
        assert PauliOperator.from_string(str(op)) == op


class TestPauliAlgebra:
    def test_single_site_product(self):
        assert PauliOperator.from_string("X0") * PauliOperator.from_string("Y0") == PauliOperator.from_term(
            [(0, "Z")], 1j
        )

    def test_two_site_product(self):
        product = PauliOperator.from_string("X0 Y1") * PauliOperator.from_string("Y0 X1")
        assert product == PauliOperator.from_string("Z0 Z1")

    def test_cancellation(self):
        x0 = PauliOperator.from_string("X0")
        assert (x0 + (-1) * x0).is_zero()
        assert (x0 - x0).is_zero()

    def test_square_is_identity(self):
        y = PauliOperator.from_string("Y2")
        assert y * y == PauliOperator.identity()

    def test_matrix_homomorphism(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 4))
            a, b = random_pauli(rng, n), random_pauli(rng, n)
            assert np.max(np.abs((a * b).to_matrix(n) - a.to_matrix(n) @ b.to_matrix(n))) < 1e-10
            assert np.max(np.abs((a + b).to_matrix(n) - a.to_matrix(n) - b.to_matrix(n))) < 1e-10
            assert np.max(np.abs(a.scale(0.5j).to_matrix(n) - 0.5j * a.to_matrix(n))) < 1e-10


class TestFermion:
    def test_hopping_term(self):
        f = FermionOperator.from_string("0^ 1")
        assert list(f.items()) == [(((0, True), (1, False)), 1 + 0j)]
        assert f.n_qubits() == 2

    def test_number_operator(self):
        f = FermionOperator.from_string("2.5 0^ 0")
        assert list(f.items()) == [(((0, True), (0, False)), 2.5 + 0j)]
        assert jordan_wigner(FermionOperator.from_string("0^ 0")) == PauliOperator.from_string("0.5 - 0.5 Z0")

    def test_hopping_pair(self):
        expected = PauliOperator.from_string("0.5 X0 X1 + 0.5 Y0 Y1")
        assert jordan_wigner(FermionOperator.from_string("0^ 1 + 1^ 0")) == expected

    def test_malformed(self):
        with pytest.raises(ParseError):
            FermionOperator.from_string("0^^")

    def test_zero_maps_to_zero(self):
        assert jordan_wigner(FermionOperator()).is_zero()

    def test_hermitian_conjugate(self):
        f = FermionOperator.from_string("(1.0, 2.0) 0^ 1")
        assert f.hermitian_conjugate() == FermionOperator({((1, True), (0, False)): complex(1.0, -2.0)})

    def test_anticommutation(self):
        n = 3
        for p in range(n):
            for q in range(n):
                a_p = jordan_wigner(FermionOperator({((p, False),): 1.0})).to_matrix(n)
                a_q_dag = jordan_wigner(FermionOperator({((q, True),): 1.0})).to_matrix(n)
                expected = np.eye(2**n) if p == q else np.zeros((2**n, 2**n))
                assert np.allclose(a_p @ a_q_dag + a_q_dag @ a_p, expected)

    def test_matches_brute_force(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 4))
            f = random_fermion(rng, n)
            assert np.max(np.abs(jordan_wigner(f).to_matrix(n) - brute_force(f, n))) < 1e-10

    def test_transform_service(self, framework):
        f = api.get_observable("fermion", "0^ 1 + 1^ 0")
        transform = api.get_observable_transform("jordan-wigner")
        assert transform.transform(f) == jordan_wigner(f)


class TestObserve:
    def test_x0x1_on_ansatz(self):
        ansatz = QuilCompiler().compile(ANSATZ_QUIL).get_composite("ansatz")
        circuits = PauliOperator.from_string("X0 X1").observe(ansatz)
        assert len(circuits) == 1
        appended = [(leaf.name, leaf.bits) for leaf in circuits[0].leaves()][3:]
        assert appended == [("H", [0]), ("H", [1]), ("Measure", [0]), ("Measure", [1])]
        assert circuits[0].metadata["term"] == "X0X1"
        assert circuits[0].variables == ["x"]

    def test_h3_on_ansatz(self, framework):
        (ansatz,) = api.qasm(H3_ANSATZ)
        op = PauliOperator.from_string(H3)
        circuits = op.observe(ansatz)
        assert len(circuits) == 7
        for circuit, (key, coeff) in zip(circuits, op.non_identity_terms()):
            measured = [leaf.bits[0] for leaf in circuit.leaves() if leaf.is_measure]
            assert measured == [site for site, _ in key]
            assert circuit.metadata["coefficient"] == pytest.approx(coeff.real)

    def test_y_basis_change(self):
        circuit = PauliOperator.from_string("Y1").observe(CompositeNode("empty"))[0]
        rx = [leaf for leaf in circuit.leaves() if leaf.name == "Rx"]
        assert rx[0].bits == [1] and rx[0].params[0].to_float() == pytest.approx(math.pi / 2)

    def test_identity_only(self):
        assert PauliOperator.identity(3.0).observe(CompositeNode("empty")) == []

    def test_already_measured(self):
        c = CompositeNode("c", [], [create_instruction("H", [0]), create_instruction("Measure", [0])])
        with pytest.raises(AlreadyMeasured):
            PauliOperator.from_string("Z0").observe(c)

    def test_energy_assembly_matches_statevector(self, framework, rng):
        (ansatz,) = api.qasm(H3_ANSATZ)
        op = PauliOperator.from_string(H3)
        sim = StatevectorSimulator().initialize({})
        for _ in range(3):
            x = list(rng.uniform(-math.pi, math.pi, 2))
            buffer = QuantumBuffer(3)
            sim.execute(buffer, [c.evaluate(x) for c in op.observe(ansatz)])
            energy = op.identity_coefficient().real + sum(
                coeff.real * child.expectation_value_z()
                for (_, coeff), child in zip(op.non_identity_terms(), buffer.get_children())
            )

            state = QuantumBuffer(3)
            sim.execute(state, ansatz.evaluate(x))
            psi = state["statevector"]
            assert energy == pytest.approx(float(np.real(psi.conj() @ op.to_matrix(3) @ psi)), abs=1e-9)


class TestExpectationFromCounts:
    def test_even_parity(self):
        assert expectation_from_counts({"00": 500, "11": 500}, [0, 1]) == 1.0

    def test_odd_parity(self):
        assert expectation_from_counts({"01": 500, "10": 500}, [0, 1]) == -1.0

    def test_single_site(self):
        assert expectation_from_counts({"00": 8192}, [0]) == 1.0
        assert expectation_from_counts({"10": 1, "00": 3}, [0]) == 0.5

    def test_empty(self):
        with pytest.raises(EmptyCounts):
            expectation_from_counts({}, [0])
