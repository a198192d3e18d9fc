"""Bit-level numeric interpretation of classical memory segments.

A 64-bit segment ``[low-high]`` is the word whose most significant bit is
``C[high]`` and least significant bit is ``C[low]``, read as IEEE-754 binary64.
A 128-bit segment holds a complex number: real part in ``[low-(low+63)]``,
imaginary part in ``[(low+64)-(low+127)]``.
"""
from __future__ import annotations

import struct

import numpy as np

from .syntax.ast import Segment

DEFAULT_MEMORY_BITS = 65536


class SegmentError(IndexError):
    pass


def new_memory(n_bits: int) -> np.ndarray:
    return np.zeros(n_bits, dtype=np.uint8)


def _check(memory: np.ndarray, seg: Segment, widths=(64, 128)):
    if seg.width not in widths:
        raise SegmentError(f"segment [{seg.low}-{seg.high}] has unsupported width {seg.width}")
    if seg.high >= memory.shape[0]:
        raise SegmentError(f"segment [{seg.low}-{seg.high}] exceeds memory of {memory.shape[0]} bits")


def _read_word(memory: np.ndarray, low: int) -> int:
    bits = memory[low:low + 64]
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def _write_word(memory: np.ndarray, low: int, word: int):
    raw = np.frombuffer(word.to_bytes(8, "little"), dtype=np.uint8)
    memory[low:low + 64] = np.unpackbits(raw, bitorder="little")


def _f2w(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def _w2f(w: int) -> float:
    return struct.unpack("<d", struct.pack("<Q", w))[0]


def read_segment(memory: np.ndarray, seg: Segment):
    """Return a float for 64-bit segments and a complex for 128-bit ones."""
    _check(memory, seg)
    if seg.width == 64:
        return _w2f(_read_word(memory, seg.low))
    return complex(_w2f(_read_word(memory, seg.low)), _w2f(_read_word(memory, seg.low + 64)))


def write_segment(memory: np.ndarray, seg: Segment, value):
    _check(memory, seg)
    if seg.width == 64:
        if isinstance(value, complex):
            if value.imag != 0.0:
                raise TypeError("a 64-bit segment holds a real number")
            value = value.real
        _write_word(memory, seg.low, _f2w(float(value)))
        return
    value = complex(value)
    _write_word(memory, seg.low, _f2w(value.real))
    _write_word(memory, seg.low + 64, _f2w(value.imag))


def read_word_bits(memory: np.ndarray, seg: Segment) -> str:
    """Segment bits as a string, most significant (``C[high]``) first."""
    if seg.high >= memory.shape[0]:
        raise SegmentError(f"segment [{seg.low}-{seg.high}] exceeds memory of {memory.shape[0]} bits")
    return "".join(str(int(b)) for b in memory[seg.low:seg.high + 1][::-1])
