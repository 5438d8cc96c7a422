import math

import numpy as np
import pytest
from scipy.linalg import expm

import api
import gates
from conftest import equal_up_to_phase
from errors import ComplexCoefficient, DisconnectedQubit, EmptyOperator, ServiceNotFound, UnknownInstruction
from generators import ExpIThetaComposite, QftComposite, RangeComposite
from ir import CompositeNode, create_instruction
from observable import FermionOperator, PauliOperator, jordan_wigner
from simulator import circuit_unitary
from transforms import IdentityEmbedding, SwapRouting

Z = np.diag([1.0, -1.0]).astype(complex)
Y = np.array([[0, -1j], [1j, 0]])


def dft(n):
    dim = 2**n
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return np.exp(2j * math.pi * j * k / dim) / math.sqrt(dim)


def layout_permutation(layout, n):
    """Matrix sending logical basis states to physical ones."""
    dim = 2**n
    p = np.zeros((dim, dim))
    for index in range(dim):
        logical = [(index >> (n - 1 - q)) & 1 for q in range(n)]
        physical = [0] * n
        for q, bit in enumerate(logical):
            physical[layout[q]] = bit
        p[int("".join(map(str, physical)), 2), index] = 1
    return p


def exp_i_theta(options, theta):
    gen = ExpIThetaComposite()
    assert gen.expand(options)
    return gen.evaluate([theta])


class TestGateCatalog:
    def test_unitary_sweep(self, rng):
        for gate in gates.CATALOG.values():
            if gate.kind != gates.GATE:
                continue
            for _ in range(100 if gate.n_params else 1):
                u = gates.gate_unitary(gate.name, rng.uniform(-2 * math.pi, 2 * math.pi, gate.n_params))
                assert np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < 1e-12

    def test_pauli_x(self):
        assert np.array_equal(gates.gate_unitary("X"), [[0, 1], [1, 0]])

    def test_ry_pi(self):
        u = gates.gate_unitary("Ry", [math.pi])
        assert np.allclose(u, [[0, -1], [1, 0]], atol=1e-12)
        assert np.allclose(u, expm(-0.5j * math.pi * Y), atol=1e-12)

    @pytest.mark.parametrize("theta", [0.3, 1.1, 2.9])
    def test_u_reduces_to_rx(self, theta):
        assert equal_up_to_phase(
            gates.gate_unitary("U", [theta, -math.pi / 2, math.pi / 2]), gates.gate_unitary("Rx", [theta])
        )

    def test_u_phase_rotation(self):
        lam = 0.7
        assert equal_up_to_phase(gates.gate_unitary("U", [0, 0, lam]), np.diag([1, np.exp(1j * lam)]))

    def test_decompositions(self, rng):
        for name, rule in gates.DECOMPOSITIONS.items():
            gate = gates.lookup(name)
            params = list(rng.uniform(-math.pi, math.pi, gate.n_params))
            product = np.eye(2, dtype=complex)
            for step, bits, ps in rule([0], params):
                product = gates.gate_unitary(step, ps) @ product
            assert equal_up_to_phase(product, gates.gate_unitary(name, params))

    def test_unknown(self):
        with pytest.raises(UnknownInstruction):
            gates.gate_unitary("Toffoli")

    def test_annealing_instruction_canonical_order(self):
        qmi = create_instruction("qmi", [2, 0], [0.5])
        assert qmi.bits == [0, 2]
        assert qmi.is_anneal


class TestRange:
    def test_nq(self):
        r = RangeComposite()
        assert r.expand({"gate": "H", "nq": 4})
        assert [(leaf.name, leaf.bits) for leaf in r.leaves()] == [("H", [q]) for q in range(4)]

    def test_half_open(self):
        r = RangeComposite()
        assert r.expand({"gate": "X", "start": 2, "end": 5})
        assert [leaf.bits[0] for leaf in r.leaves()] == [2, 3, 4]

    def test_empty_range(self):
        assert not RangeComposite().expand({"gate": "H", "start": 3, "end": 3})

    def test_rejects_two_qubit_gate(self):
        assert not RangeComposite().expand({"gate": "CX", "nq": 2})


class TestQft:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_dft(self, n):
        qft = QftComposite()
        assert qft.expand({"nq": n})
        assert equal_up_to_phase(circuit_unitary(qft, n), dft(n))

    def test_single_qubit_is_hadamard(self):
        qft = QftComposite()
        qft.expand({"nq": 1})
        assert [leaf.name for leaf in qft.leaves()] == ["H"]

    def test_missing_size(self):
        assert not QftComposite().expand({})


class TestExpITheta:
    def test_zero_angle_is_identity(self):
        u = circuit_unitary(exp_i_theta({"pauli": "X0 Y1 - Y0 X1"}, 0.0), 2)
        assert equal_up_to_phase(u, np.eye(4))

    @pytest.mark.parametrize("theta", [-1.3, -0.2, 0.4, 0.7, 2.5])
    def test_commuting_pauli_terms(self, theta):
        m = PauliOperator.from_string("X0 Y1 - Y0 X1").to_matrix(2)
        u = circuit_unitary(exp_i_theta({"pauli": "X0 Y1 - Y0 X1"}, theta), 2)
        assert np.max(np.abs(u - expm(1j * theta * m))) < 1e-9

    @pytest.mark.parametrize("theta", [-1.3, -0.2, 0.4, 0.7, 2.5])
    def test_fermion_generator(self, theta):
        m = jordan_wigner(FermionOperator.from_string("0^ 1 + 1^ 0")).to_matrix(2)
        u = circuit_unitary(exp_i_theta({"fermion": "0^ 1 + 1^ 0"}, theta), 2)
        assert np.max(np.abs(u - expm(1j * theta * m))) < 1e-9

    def test_single_z(self):
        theta = 0.45
        u = circuit_unitary(exp_i_theta({"pauli": "Z0"}, theta), 1)
        assert equal_up_to_phase(u, gates.gate_unitary("Rz", [-2 * theta]))
        assert np.max(np.abs(u - expm(1j * theta * Z))) < 1e-12

    def test_random_single_terms_exact(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 4))
            key = [(q, "XYZ"[rng.integers(3)]) for q in range(n) if rng.random() < 0.7] or [(0, "Y")]
            op = PauliOperator.from_term(key, float(rng.uniform(-2, 2)))
            gen = ExpIThetaComposite()
            assert gen.expand({"pauli": str(op)})
            theta = float(rng.uniform(-math.pi, math.pi))
            u = circuit_unitary(gen.evaluate([theta]), n)
            assert np.max(np.abs(u - expm(1j * theta * op.to_matrix(n)))) < 1e-9

    def test_named_variable(self):
        gen = ExpIThetaComposite(variables=["t0"])
        gen.expand({"pauli": "X0 X1"})
        assert gen.variables == ["t0"]
        assert gen.symbols() == {"t0"}

    def test_complex_coefficient(self):
        with pytest.raises(ComplexCoefficient):
            ExpIThetaComposite().expand({"pauli": "(0.0, 1.0) X0"})

    def test_identity_only(self):
        with pytest.raises(EmptyOperator):
            ExpIThetaComposite().expand({"pauli": "1.5"})

    def test_missing_operator(self):
        assert not ExpIThetaComposite().expand({})


def random_tree(rng, n):
    order = [int(q) for q in rng.permutation(n)]
    return [(order[i], order[int(rng.integers(i))]) for i in range(1, n)]


def random_concrete_circuit(rng, n, size=10):
    c = CompositeNode("c")
    for _ in range(size):
        if rng.random() < 0.5:
            a, b = (int(q) for q in rng.choice(n, 2, replace=False))
            c.add_instruction(create_instruction(["CX", "CZ", "Swap"][rng.integers(3)], [a, b]))
        else:
            c.add_instruction(create_instruction("Ry", [int(rng.integers(n))], [float(rng.uniform(-3, 3))]))
    return c


class TestSwapRouting:
    def test_adjacent_unchanged(self):
        c = CompositeNode("c", [], [create_instruction("CX", [0, 1])])
        routed = SwapRouting().transform(c, options={"connectivity": [(0, 1)]})
        assert [(leaf.name, leaf.bits) for leaf in routed.leaves()] == [("CX", [0, 1])]
        assert routed.metadata["swaps-inserted"] == 0

    def test_line(self):
        c = CompositeNode("c", [], [create_instruction("H", [0]), create_instruction("CX", [0, 2])])
        routed = SwapRouting().transform(c, options={"connectivity": [(0, 1), (1, 2)]})
        assert [(leaf.name, leaf.bits) for leaf in routed.leaves()] == [("H", [0]), ("Swap", [0, 1]), ("CX", [1, 2])]
        layout = routed.metadata["final-layout"]
        assert layout == [1, 0, 2]
        expected = layout_permutation(layout, 3) @ circuit_unitary(c, 3)
        assert np.max(np.abs(circuit_unitary(routed, 3) - expected)) < 1e-9
        assert c.n_instructions() == 2

    def test_disconnected(self):
        c = CompositeNode("c", [], [create_instruction("CX", [0, 3])])
        with pytest.raises(DisconnectedQubit):
            SwapRouting().transform(c, options={"connectivity": [(0, 1), (2, 3)]})

    def test_random_connected_graphs(self, rng):
        for _ in range(20):
            edges = random_tree(rng, 4)
            c = random_concrete_circuit(rng, 4)
            routed = SwapRouting().transform(c, options={"connectivity": edges})
            allowed = {tuple(sorted(e)) for e in edges}
            for leaf in routed.leaves():
                if len(leaf.bits) == 2:
                    assert tuple(sorted(leaf.bits)) in allowed
            layout = routed.metadata["final-layout"]
            expected = layout_permutation(layout, 4) @ circuit_unitary(c, 4)
            assert np.max(np.abs(circuit_unitary(routed, 4) - expected)) < 1e-9

    def test_registered_transformations(self, framework):
        c = CompositeNode("c", [], [create_instruction("CX", [0, 2])])
        same = api.apply_ir_transformation("identity", c)
        assert same == c and same is not c
        routed = api.apply_ir_transformation("swap-routing", c, transform_options={"connectivity": [(0, 1), (1, 2)]})
        assert routed.metadata["swaps-inserted"] == 1
        with pytest.raises(ServiceNotFound):
            api.apply_ir_transformation("lookahead", c)


class TestEmbedding:
    def test_identity(self):
        assert IdentityEmbedding().embed([(0, 1), (1, 2)]) == {0: [0], 1: [1], 2: [2]}

    def test_missing_hardware_qubit(self):
        with pytest.raises(DisconnectedQubit):
            IdentityEmbedding().embed([(0, 5)], [(0, 1)])
