"""Dense operators and state vectors in the lexicographic computational basis.

Amplitude index bit ``k`` (weight ``2**k``) is the basis value of qubit ``k``,
so qubit ``Nq-1`` is the leftmost tensor factor. In a gate application
``G a b`` the first listed qubit is the high-order factor of ``G``'s matrix.

Two routes compute the same thing:

* :func:`lift_gate` builds the full ``2**Nq`` operator from identity padding and
  adjacent transpositions. It is dense and capped at :data:`DENSE_MAX_QUBITS`.
* :func:`apply_gate` acts on a state in place without materializing the lift.
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

DENSE_MAX_QUBITS = 12
NORM_TOL = 1e-10
UNITARY_TOL = 1e-8

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


class DimensionError(ValueError):
    pass


class NormError(ArithmeticError):
    pass


def as_matrix(u) -> np.ndarray:
    m = np.asarray(u, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kronecker(a, b, max_dim: int = 2 ** DENSE_MAX_QUBITS) -> np.ndarray:
    """Block Kronecker product ``(A (x) B)[i, j] = A[i, j] * B``."""
    a, b = as_matrix(a), as_matrix(b)
    dim = a.shape[0] * b.shape[0]
    if dim > max_dim:
        raise DimensionError(f"Kronecker product of dimension {dim} exceeds cap {max_dim}")
    return np.kron(a, b)


def identity(n_qubits: int) -> np.ndarray:
    return np.eye(2 ** n_qubits, dtype=complex)


def _dense_check(n_qubits: int):
    if n_qubits > DENSE_MAX_QUBITS:
        raise DimensionError(f"dense operators limited to {DENSE_MAX_QUBITS} qubits, got {n_qubits}")


def _check_qubits(u: np.ndarray, qubits: Sequence[int], n_qubits: int | None):
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"repeated qubit in {qubits}")
    if any(q < 0 for q in qubits):
        raise ValueError(f"negative qubit index in {qubits}")
    if n_qubits is not None and any(q >= n_qubits for q in qubits):
        raise IndexError(f"qubit index out of range for {n_qubits} qubits: {qubits}")
    if u.shape[0] != 2 ** len(qubits):
        raise DimensionError(f"{u.shape[0]}x{u.shape[0]} matrix cannot act on {len(qubits)} qubit(s)")
    return qubits


def pad_adjacent(u, top: int, n_qubits: int) -> np.ndarray:
    """Lift ``u`` acting on the adjacent descending qubits ``top, top-1, ...``."""
    u = as_matrix(u)
    m = u.shape[0].bit_length() - 1
    low = top - m + 1
    if low < 0 or top >= n_qubits:
        raise IndexError(f"cannot place a {m}-qubit operator at qubit {top} of {n_qubits}")
    _dense_check(n_qubits)
    return reduce(kronecker, [identity(n_qubits - 1 - top), u, identity(low)])


def transposition(i: int, n_qubits: int) -> np.ndarray:
    """The adjacent transposition exchanging qubits ``i`` and ``i + 1``."""
    return pad_adjacent(SWAP, i + 1, n_qubits)


def arrangement(qubits: Sequence[int]) -> tuple[list[int], int]:
    """Adjacent transpositions that bring ``qubits`` to descending adjacent positions.

    Returns ``(taus, top)``: apply ``tau_{taus[0]}`` first. Afterwards
    ``qubits[k]`` sits at position ``top - k``. For two qubits this reproduces
    the ``pi_{j,k}`` / ``pi'_{j,k}`` constructions.
    """
    top = max(qubits)
    layout = {q: q for q in qubits}  # logical qubit -> current position
    occupant = {q: q for q in qubits}  # position -> logical qubit (targets only)
    taus: list[int] = []
    for k, q in enumerate(qubits):
        target = top - k
        while layout[q] < target:
            p = layout[q]
            taus.append(p)
            other = occupant.get(p + 1)
            layout[q] = p + 1
            occupant[p + 1] = q
            if other is not None:
                layout[other] = p
                occupant[p] = other
            else:
                occupant.pop(p, None)
    return taus, top


def permutation_operator(taus: Sequence[int], n_qubits: int) -> np.ndarray:
    """``tau_{taus[-1]} ... tau_{taus[0]}`` as a dense matrix."""
    out = identity(n_qubits)
    for i in taus:
        out = transposition(i, n_qubits) @ out
    return out


def lift_gate(u, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """Dense ``2**Nq`` operator for ``u`` applied to ``qubits`` (first listed is most significant)."""
    u = as_matrix(u)
    qubits = _check_qubits(u, qubits, n_qubits)
    _dense_check(n_qubits)
    taus, top = arrangement(qubits)
    v = pad_adjacent(u, top, n_qubits)
    if not taus:
        return v
    pi = permutation_operator(taus, n_qubits)
    return pi.T @ v @ pi


def _basis_slices(n: int, qubits: Sequence[int]) -> list[tuple]:
    """Index tuples into the ``(2,)*n`` view selecting each target bit pattern."""
    m = len(qubits)
    axes = [n - 1 - q for q in qubits]
    out = []
    for k in range(2 ** m):
        idx: list = [slice(None)] * n
        for j, ax in enumerate(axes):
            idx[ax] = (k >> (m - 1 - j)) & 1
        out.append(tuple(idx))
    return out


def _apply_sparse(view: np.ndarray, u: np.ndarray, slices: list[tuple]):
    """Gates with at most one nonzero per row (diagonal, CNOT, SWAP, ...)."""
    diag = np.diag(u)
    if np.count_nonzero(u) == np.count_nonzero(diag):
        for k, d in enumerate(diag):
            if d != 1:
                view[slices[k]] *= d
        return
    olds = [view[sl].copy() for sl in slices]
    for k, row in enumerate(u):
        (l,) = np.flatnonzero(row)
        if row[l] == 1:
            view[slices[k]] = olds[l]
        else:
            view[slices[k]] = olds[l] * row[l]


def apply_gate(amplitudes: np.ndarray, u, qubits: Sequence[int]) -> np.ndarray:
    """Apply ``u`` to ``qubits`` of a raw amplitude array in place and return it.

    No normalization check is made here, so this also serves unnormalized vectors.
    """
    u = as_matrix(u)
    n = amplitudes.shape[0].bit_length() - 1
    if amplitudes.shape[0] != 2 ** n:
        raise DimensionError("amplitude array length is not a power of two")
    qubits = _check_qubits(u, qubits, n)
    m = len(qubits)
    view = amplitudes.reshape((2,) * n)
    if np.all(np.count_nonzero(u, axis=1) <= 1) and np.count_nonzero(u) == u.shape[0]:
        _apply_sparse(view, u, _basis_slices(n, qubits))
        return amplitudes
    if m == 1:
        q = qubits[0]
        v = amplitudes.reshape(2 ** (n - 1 - q), 2, 2 ** q)
        if q >= 4:
            v[...] = np.matmul(u, v)
            return amplitudes
        a0 = v[:, 0, :]
        a1 = v[:, 1, :]
        new0 = u[0, 0] * a0 + u[0, 1] * a1
        new1 = u[1, 0] * a0 + u[1, 1] * a1
        v[:, 0, :] = new0
        v[:, 1, :] = new1
        return amplitudes
    axes = [n - 1 - q for q in qubits]
    front = list(range(m))
    gathered = np.moveaxis(view, axes, front).reshape(2 ** m, -1)
    result = (u @ gathered).reshape((2,) * n)
    view[...] = np.moveaxis(result, front, axes)
    return amplitudes


def check_unitary(u, tol: float = UNITARY_TOL) -> bool:
    """True iff ``max |U U^dagger - I| <= tol``."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    u = as_matrix(u)
    return bool(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) <= tol)


class StateVector:
    """``2**Nq`` amplitudes, initialized to ``|0...0>``."""

    def __init__(self, n_qubits: int, amplitudes: np.ndarray | None = None):
        self.n_qubits = n_qubits
        if amplitudes is None:
            amplitudes = np.zeros(2 ** n_qubits, dtype=complex)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.asarray(amplitudes, dtype=complex)
            if amplitudes.shape != (2 ** n_qubits,):
                raise DimensionError(f"expected {2 ** n_qubits} amplitudes, got {amplitudes.shape}")
        self.amplitudes = amplitudes

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "StateVector":
        amplitudes = np.array(amplitudes, dtype=complex)
        n = amplitudes.shape[0].bit_length() - 1
        sv = cls(n, amplitudes)
        sv.assert_normalized()
        return sv

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def assert_normalized(self, tol: float = NORM_TOL):
        nrm = self.norm()
        if abs(nrm - 1.0) > tol:
            raise NormError(f"state norm {nrm!r} deviates from 1 by more than {tol}")

    def reset(self):
        self.amplitudes[:] = 0
        self.amplitudes[0] = 1.0

    def apply(self, u, qubits: Sequence[int], check_norm: bool = True) -> "StateVector":
        apply_gate(self.amplitudes, u, qubits)
        if check_norm:
            self.assert_normalized()
        return self

    def _split(self, qubit: int) -> np.ndarray:
        if not 0 <= qubit < self.n_qubits:
            raise IndexError(f"qubit {qubit} out of range for {self.n_qubits} qubits")
        return self.amplitudes.reshape(2 ** (self.n_qubits - 1 - qubit), 2, 2 ** qubit)

    def probabilities(self, qubit: int) -> tuple[float, float]:
        """Branch probabilities ``(p0, p1)`` for measuring ``qubit``."""
        v = self._split(qubit)
        p0 = float(np.sum(np.abs(v[:, 0, :]) ** 2))
        p1 = float(np.sum(np.abs(v[:, 1, :]) ** 2))
        return p0, p1

    def collapse(self, qubit: int, outcome: int, probability: float):
        """Project onto ``qubit == outcome`` and rescale by ``1/sqrt(probability)``."""
        v = self._split(qubit)
        v[:, 1 - outcome, :] = 0
        v[:, outcome, :] *= 1.0 / np.sqrt(probability)

    def dump(self) -> str:
        """``index<TAB>real<TAB>imag`` per amplitude, 17 significant digits."""
        return "".join(f"{k}\t{z.real:.17g}\t{z.imag:.17g}\n" for k, z in enumerate(self.amplitudes))
