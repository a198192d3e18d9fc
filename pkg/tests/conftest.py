import numpy as np
import pytest

from quilvm import load, parse_program, run

BELL = "H 0\nCNOT 0 1\n"

XOR_CIRCUIT = """DEFCIRCUIT XOR a b r:
    # Uses (a | b) & (~a | ~b)
    MOVE b r
    OR a r              # r = a | b
    JUMP-UNLESS @end r  # short-circuit
    MOVE b r
    NOT a
    NOT r
    OR a r              # r = ~a | ~b
    NOT a               # undo change to a
    LABEL @end
"""

CLEAR_CIRCUIT = """DEFCIRCUIT CLEAR q scratch_bit:
    MEASURE q scratch_bit
    JUMP-UNLESS @end scratch_bit
    X q
    LABEL @end
"""

RANDOM_NUMBER = "H 0\nH 1\nMEASURE 0 [0]\nMEASURE 1 [1]\n"

CFG_EXAMPLE = """LABEL @START
H 0
MEASURE 0 [0]
JUMP-WHEN @END [0]
H 0
H 1
CNOT 1 0
JUMP @START
LABEL @END
Y 0
MEASURE 0 [0]
MEASURE 1 [1]
"""


def execute(text, **kwargs):
    return run(load(parse_program(text)), **kwargs)


def random_state(rng, n_qubits):
    v = rng.normal(size=2 ** n_qubits) + 1j * rng.normal(size=2 ** n_qubits)
    return v / np.linalg.norm(v)


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def bit(x, q):
    return (x >> q) & 1


def oracle_lift(u, qubits, n):
    """Lift via an explicit basis-relabelling permutation P: L = P^T (I (x) U) P.

    P sends basis index x to y whose low m bits hold the target bits (first
    listed qubit most significant) and whose high bits hold the remaining
    qubits in ascending order.
    """
    m = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    dim = 2 ** n
    p = np.zeros((dim, dim))
    for x in range(dim):
        low = sum(bit(x, q) << (m - 1 - j) for j, q in enumerate(qubits))
        high = sum(bit(x, q) << k for k, q in enumerate(rest))
        p[(high << m) | low, x] = 1
    big = np.kron(np.eye(2 ** (n - m)), u)
    return p.T @ big @ p


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


# acceptance reporting ---------------------------------------------------------

ACCEPTANCE_RESULTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[n])
