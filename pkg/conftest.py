import numpy as np
import pytest

import api
from server import Server

BELL_QUIL = """__qpu__ void bell(qbit q) {
   H 0
   CX 0 1
   MEASURE 0 [0]
   MEASURE 1 [1]
}
"""

ANSATZ_QUIL = """__qpu__ ansatz(AcceleratorBuffer q, double x)
{
   X 0
   Ry(x) 1
   CX 1 0
}
__qpu__ X0X1(AcceleratorBuffer q, double x)
{
   ansatz(q, x);
   H 0
   H 1
   MEASURE 0 [0]
   MEASURE 1 [1]
}
"""

H3 = (
    "15.531709 - 2.1433 X0X1 - 2.1433 Y0Y1 + .21829 Z0 - 6.125 Z1 - 9.625 Z2"
    " - 3.91 X1 X2 - 3.91 Y1 Y2"
)

H3_ANSATZ = """
.compiler xasm
.circuit ansatz
.parameters t0, t1
.qbit q
X(q[0]);
exp_i_theta(q, t0, {{"pauli", "X0 Y1 - Y0 X1"}});
exp_i_theta(q, t1, {{"pauli", "X0 Z1 Y2 - X2 Z1 Y0"}});
"""

DDCL_ANSATZ = """
__qpu__ ddcl(AcceleratorBuffer q, double x) {
  U(q[0], x[0], -pi/2, pi/2 );
  U(q[0], 0, 0, x[1]);
  U(q[1], x[2], -pi/2, pi/2);
  U(q[1], 0, 0, x[3]);
  CNOT(q[0], q[1]);
  U(q[0], 0, 0, x[4]);
  U(q[0], x[5], -pi/2, pi/2);
  U(q[1], 0, 0, x[6]);
  U(q[1], x[7], -pi/2, pi/2);
}
"""


@pytest.fixture
def framework():
    api.initialize([])
    yield api
    api.finalize()


@pytest.fixture
def reference_server():
    server = Server(port=0).start()
    yield server
    server.stop()


@pytest.fixture
def rng():
    return np.random.default_rng(20200401)


def equal_up_to_phase(a, b, tol=1e-9):
    a = np.asarray(a)
    b = np.asarray(b)
    index = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[index]) < tol:
        return np.max(np.abs(a)) < tol
    phase = a[index] / b[index]
    return abs(abs(phase) - 1.0) < tol and np.max(np.abs(a - phase * b)) < tol
