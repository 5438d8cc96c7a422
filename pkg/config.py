import os

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8000
DEFAULT_ENDPOINT = f"http://{DEFAULT_HOST}:{DEFAULT_PORT}"
ENDPOINT_ENV = "QF_REMOTE_ENDPOINT"

# Remote job polling
REMOTE_TIMEOUT = 30.0
POLL_INTERVAL = 0.05
HTTP_TIMEOUT = 10.0

# Reference server
JOB_HISTORY = 1000

# Simulator limits
MAX_QUBITS = 20
STATEVECTOR_QUBITS = 10
MAX_ANNEAL_SPINS = 20

PRUNE_TOLERANCE = 1e-12
DEFAULT_SHOTS = 1024


def remote_endpoint(explicit=None):
    if explicit:
        return explicit.rstrip("/")
    return os.environ.get(ENDPOINT_ENV, DEFAULT_ENDPOINT).rstrip("/")
