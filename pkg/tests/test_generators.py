import numpy as np
import pytest

from quilvm import load, parse_program
from quilvm.generators import gen_bell, gen_qft
from quilvm.linalg import StateVector
from quilvm.qvm import load_machine

S2 = 1 / np.sqrt(2)


def dft(n):
    dim = 2 ** n
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return np.exp(2j * np.pi * j * k / dim) / np.sqrt(dim)


def simulated_unitary(text, n):
    exe = load(parse_program(text))
    cols = []
    for j in range(2 ** n):
        m = load_machine(exe, n_qubits=n, seed=0)
        amps = np.zeros(2 ** n, dtype=complex)
        amps[j] = 1
        m.psi = StateVector(n, amps)
        m.run()
        cols.append(m.psi.amplitudes.copy())
    return np.column_stack(cols)


def test_qft_one_qubit():
    assert gen_qft(1) == "H 0\n"


def test_qft_two_qubits_listing():
    assert gen_qft(2, symbolic=True) == "H 1\nCPHASE(pi/2) 0 1\nH 0\nSWAP 0 1\n"
    assert gen_qft(2) == "H 1\nCPHASE(1.5707963267948966) 0 1\nH 0\nSWAP 0 1\n"


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("symbolic", [False, True])
def test_qft_matches_dft(n, symbolic):
    u = simulated_unitary(gen_qft(n, symbolic), n)
    assert np.max(np.abs(u - dft(n))) <= 1e-10


def test_qft_structure():
    lines = gen_qft(6).splitlines()
    assert sum(line.startswith("H ") for line in lines) == 6
    assert sum(line.startswith("CPHASE") for line in lines) == 15
    assert sum(line.startswith("SWAP") for line in lines) == 3


def test_qft_rejects_zero():
    with pytest.raises(ValueError):
        gen_qft(0)


@pytest.mark.parametrize("m, n", [(0, 1), (1, 0), (2, 4)])
def test_bell(m, n):
    text = gen_bell(m, n)
    assert text.startswith("DEFCIRCUIT BELL Qm Qn:\n")
    exe = load(parse_program(text))
    mach = load_machine(exe, seed=0).run()
    want = np.zeros(2 ** exe.n_qubits)
    want[0] = S2
    want[(1 << m) | (1 << n)] = S2
    assert np.max(np.abs(mach.psi.amplitudes - want)) <= 1e-12


def test_bell_same_qubit():
    with pytest.raises(ValueError):
        gen_bell(0, 0)
