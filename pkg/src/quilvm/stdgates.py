"""The standard gate set, as a matrix table and as the shipped ``stdgates.quil``."""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .syntax.expr import call_function, cis
from .syntax.includes import embedded_stdgates


class StandardGate(NamedTuple):
    n_params: int
    build: Callable[..., np.ndarray]


def _m(rows) -> np.ndarray:
    return np.array(rows, dtype=complex)


def _phase(theta):
    return _m([[1, 0], [0, cis(theta)]])


def _diag4(pos):
    def build(theta):
        d = [1, 1, 1, 1]
        d[pos] = cis(theta)
        return np.diag(np.array(d, dtype=complex))
    return build


def _pswap(theta):
    e = cis(theta)
    return _m([[1, 0, 0, 0], [0, 0, e, 0], [0, e, 0, 0], [0, 0, 0, 1]])


def _cs(theta):
    return call_function("cos", theta / 2), call_function("sin", theta / 2)


def _rx(theta):
    c, s = _cs(theta)
    return _m([[c, -1j * s], [-1j * s, c]])


def _ry(theta):
    c, s = _cs(theta)
    return _m([[c, -s], [s, c]])


def _rz(theta):
    return _m([[cis(-theta / 2), 0], [0, cis(theta / 2)]])


def _controlled(u: np.ndarray) -> np.ndarray:
    n = u.shape[0]
    out = np.eye(2 * n, dtype=complex)
    out[n:, n:] = u
    return out


_R2 = 1 / math.sqrt(2)
_X = _m([[0, 1], [1, 0]])
_SWAP = _pswap(0.0)

TABLE: dict[str, StandardGate] = {
    "I": StandardGate(0, lambda: _m([[1, 0], [0, 1]])),
    "X": StandardGate(0, lambda: _X.copy()),
    "Y": StandardGate(0, lambda: _m([[0, -1j], [1j, 0]])),
    "Z": StandardGate(0, lambda: _m([[1, 0], [0, -1]])),
    "H": StandardGate(0, lambda: _m([[_R2, _R2], [_R2, -_R2]])),
    "PHASE": StandardGate(1, _phase),
    "S": StandardGate(0, lambda: _phase(math.pi / 2)),
    "T": StandardGate(0, lambda: _phase(math.pi / 4)),
    "CPHASE00": StandardGate(1, _diag4(0)),
    "CPHASE01": StandardGate(1, _diag4(1)),
    "CPHASE10": StandardGate(1, _diag4(2)),
    "CPHASE": StandardGate(1, _diag4(3)),
    "RX": StandardGate(1, _rx),
    "RY": StandardGate(1, _ry),
    "RZ": StandardGate(1, _rz),
    "CNOT": StandardGate(0, lambda: _controlled(_X)),
    "CCNOT": StandardGate(0, lambda: _controlled(_controlled(_X))),
    "PSWAP": StandardGate(1, _pswap),
    "SWAP": StandardGate(0, lambda: _SWAP.copy()),
    "ISWAP": StandardGate(0, lambda: _pswap(math.pi / 2)),
    "CSWAP": StandardGate(0, lambda: _controlled(_SWAP)),
}


class UnknownGate(KeyError):
    pass


def standard_gate_matrix(name: str, params: Sequence[complex] = ()) -> np.ndarray:
    try:
        gate = TABLE[name]
    except KeyError:
        raise UnknownGate(name) from None
    if len(params) != gate.n_params:
        raise ValueError(f"{name} takes {gate.n_params} parameter(s), got {len(params)}")
    return gate.build(*(complex(p) for p in params))


def stdgates_source() -> str:
    return embedded_stdgates()


@lru_cache(maxsize=1)
def _parsed():
    from .syntax.parser import parse_program
    return parse_program(stdgates_source(), source="stdgates.quil")


def standard_definitions() -> dict:
    """Gate definitions parsed from the shipped library (name -> GateDefinition)."""
    return dict(_parsed().gates)
