"""Quil generators for the QFT and Bell-pair example programs."""
from __future__ import annotations

import math


def _qft_core(lo: int, hi: int, emit, symbolic: bool):
    n = hi - lo
    if n == 1:
        emit(f"H {lo}")
        return
    _qft_core(lo + 1, hi, emit, symbolic)
    for i in range(1, n):
        q = lo + n - i
        k = n - i
        alpha = f"pi/{2 ** k}" if symbolic else f"{math.pi / 2 ** k:.17g}"
        emit(f"CPHASE({alpha}) {lo} {q}")
    emit(f"H {lo}")


def gen_qft(n_qubits: int, symbolic: bool = False) -> str:
    """Quantum Fourier transform on qubits ``0..n-1``, bit reversal included.

    Controlled-phase angles are 17-significant-digit literals unless
    ``symbolic`` is set, in which case they are written ``pi/2^k`` style.
    """
    if n_qubits < 1:
        raise ValueError("QFT needs at least one qubit")
    lines: list[str] = []
    _qft_core(0, n_qubits, lines.append, symbolic)
    for i in range(n_qubits // 2):
        lines.append(f"SWAP {i} {n_qubits - i - 1}")
    return "\n".join(lines) + "\n"


def gen_bell(m: int, n: int) -> str:
    if m == n:
        raise ValueError("Bell pair needs two distinct qubits")
    if m < 0 or n < 0:
        raise ValueError("qubit indices must be non-negative")
    return (
        "DEFCIRCUIT BELL Qm Qn:\n"
        "    H Qm\n"
        "    CNOT Qm Qn\n"
        "\n"
        f"BELL {m} {n}\n"
    )
