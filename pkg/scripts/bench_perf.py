"""Timing of the gate kernels and of multi-shot execution."""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from quilvm import load, parse_program, run_shots
from quilvm.linalg import StateVector, apply_gate
from quilvm.stdgates import standard_gate_matrix


@dataclass
class Config:
    kernel_qubits: int = 20
    repeats: int = 20
    program_qubits: int = 16
    program_gates: int = 100
    shots: int = 100
    seed: int = 0


def time_kernel(cfg: Config):
    psi = StateVector(cfg.kernel_qubits)
    rng = np.random.default_rng(cfg.seed)
    print(f"kernel timings on {cfg.kernel_qubits} qubits (ms, median of {cfg.repeats})")
    for name in ("H", "RX", "CNOT", "CPHASE", "SWAP", "CCNOT"):
        u = standard_gate_matrix(name, [0.3] if name in ("RX", "CPHASE") else [])
        m = u.shape[0].bit_length() - 1
        times = []
        for _ in range(cfg.repeats):
            qubits = [int(q) for q in rng.choice(cfg.kernel_qubits, size=m, replace=False)]
            t0 = time.perf_counter()
            apply_gate(psi.amplitudes, u, qubits)
            times.append(time.perf_counter() - t0)
        print(f"  {name:7s} {1e3 * float(np.median(times)):8.2f}")


def time_program(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    lines = []
    for _ in range(cfg.program_gates):
        if rng.random() < 0.5:
            lines.append(f"H {rng.integers(cfg.program_qubits)}")
        else:
            a, b = rng.choice(cfg.program_qubits, size=2, replace=False)
            lines.append(f"CNOT {a} {b}")
    lines += [f"MEASURE {q} [{q}]" for q in range(cfg.program_qubits)]
    exe = load(parse_program("\n".join(lines) + "\n"))
    t0 = time.perf_counter()
    run_shots(exe, cfg.shots, seed=cfg.seed)
    dt = time.perf_counter() - t0
    print(f"{cfg.shots} shots of {cfg.program_gates} gates on {cfg.program_qubits} qubits: "
          f"{dt:.2f} s ({1e3 * dt / cfg.shots:.1f} ms/shot)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kernel-qubits", type=int, default=Config.kernel_qubits)
    ap.add_argument("--shots", type=int, default=Config.shots)
    a = ap.parse_args()
    cfg = Config(kernel_qubits=a.kernel_qubits, shots=a.shots)
    time_kernel(cfg)
    time_program(cfg)
