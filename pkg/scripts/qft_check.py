"""Simulate generated QFT programs on every basis input and compare with the DFT matrix."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from quilvm import load, load_machine, parse_program
from quilvm.generators import gen_qft
from quilvm.linalg import StateVector


@dataclass
class Config:
    max_qubits: int = 6
    symbolic: bool = False
    tol: float = 1e-10


def simulated_unitary(n: int, symbolic: bool) -> np.ndarray:
    exe = load(parse_program(gen_qft(n, symbolic)))
    dim = 2 ** n
    out = np.empty((dim, dim), dtype=complex)
    for j in range(dim):
        m = load_machine(exe, n_qubits=n, seed=0)
        amps = np.zeros(dim, dtype=complex)
        amps[j] = 1
        m.psi = StateVector(n, amps)
        m.run()
        out[:, j] = m.psi.amplitudes
    return out


def dft(n: int) -> np.ndarray:
    dim = 2 ** n
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return np.exp(2j * np.pi * j * k / dim) / np.sqrt(dim)


def main(cfg: Config) -> bool:
    ok = True
    print("n\tgates\tmax|U-F|")
    for n in range(1, cfg.max_qubits + 1):
        text = gen_qft(n, cfg.symbolic)
        dev = float(np.max(np.abs(simulated_unitary(n, cfg.symbolic) - dft(n))))
        ok &= dev <= cfg.tol
        print(f"{n}\t{len(text.splitlines())}\t{dev:.3e}")
    return ok


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-qubits", type=int, default=Config.max_qubits)
    ap.add_argument("--symbolic", action="store_true")
    ap.add_argument("--tol", type=float, default=Config.tol)
    a = ap.parse_args()
    raise SystemExit(0 if main(Config(a.max_qubits, a.symbolic, a.tol)) else 1)
