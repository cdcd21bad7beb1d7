"""Dense complex matrices with pivoted elimination.

A :class:`Matrix` wraps a read-only numpy array.  At binary64 the dtype is
``complex128``; at extended precision the entries are ``mpmath.mpc`` objects
in an ``object`` array.  Every factorisation here is written out by hand so
that both dtypes run through the same code path and pivot choice is
deterministic (largest magnitude, ties to the lowest row index).
"""

from __future__ import annotations

from typing import Iterable, Sequence

import mpmath
import numpy as np

from .scalars import ComplexScalar, is_extended, to_scalar

RANK_THRESHOLD = 1e-9


def _coerce(entries) -> np.ndarray:
    if isinstance(entries, Matrix):
        entries = entries.entries
    if isinstance(entries, np.ndarray) and entries.dtype != object and not is_extended():
        if entries.ndim != 2:
            raise ValueError(f"matrix entries must be two-dimensional, got shape {entries.shape}")
        return entries.astype(np.complex128)
    arr = np.array(entries, dtype=object)
    if arr.ndim != 2:
        raise ValueError(f"matrix entries must be two-dimensional, got shape {arr.shape}")
    if is_extended():
        out = np.empty(arr.shape, dtype=object)
        for idx in np.ndindex(arr.shape):
            out[idx] = to_scalar(arr[idx])
        return out
    out = np.empty(arr.shape, dtype=np.complex128)
    for idx in np.ndindex(arr.shape):
        out[idx] = complex(arr[idx])
    return out


def _zero():
    return mpmath.mpc(0) if is_extended() else 0j


class Matrix:
    """Immutable dense complex matrix (square or rectangular)."""

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = _coerce(entries)
        a.flags.writeable = False
        self._a = a

    @classmethod
    def _wrap(cls, a: np.ndarray) -> Matrix:
        m = object.__new__(cls)
        if a.dtype != object and is_extended():
            a = _coerce(a)
        a.flags.writeable = False
        m._a = a
        return m

    # constructors

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls.diag([1] * n)

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> Matrix:
        cols = rows if cols is None else cols
        if is_extended():
            a = np.empty((rows, cols), dtype=object)
            for idx in np.ndindex(a.shape):
                a[idx] = _zero()
            return cls._wrap(a)
        return cls._wrap(np.zeros((rows, cols), dtype=np.complex128))

    @classmethod
    def diag(cls, values: Iterable) -> Matrix:
        values = [to_scalar(v) for v in values]
        n = len(values)
        m = cls.zeros(n).entries.copy()
        for i, v in enumerate(values):
            m[i, i] = v
        return cls._wrap(m)

    @classmethod
    def block(cls, blocks: Sequence[Sequence[Matrix]]) -> Matrix:
        return cls._wrap(np.block([[b.entries for b in row] for row in blocks]))

    @classmethod
    def hstack(cls, mats: Sequence[Matrix]) -> Matrix:
        return cls._wrap(np.hstack([m.entries for m in mats]))

    @classmethod
    def vstack(cls, mats: Sequence[Matrix]) -> Matrix:
        return cls._wrap(np.vstack([m.entries for m in mats]))

    # basic access

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def dim(self) -> int:
        if not self.is_square():
            raise ValueError(f"matrix of shape {self.shape} has no dimension")
        return self._a.shape[0]

    def is_square(self) -> bool:
        return self._a.shape[0] == self._a.shape[1]

    def __getitem__(self, idx) -> ComplexScalar:
        return self._a[idx]

    def __repr__(self) -> str:
        return f"Matrix({self._a.tolist()!r})"

    def columns(self, idx: Sequence[int]) -> Matrix:
        return Matrix._wrap(self._a[:, list(idx)])

    def rows(self, idx: Sequence[int]) -> Matrix:
        return Matrix._wrap(self._a[list(idx), :])

    @property
    def T(self) -> Matrix:
        return Matrix._wrap(self._a.T.copy())

    # arithmetic

    def __matmul__(self, other: Matrix) -> Matrix:
        if not isinstance(other, Matrix):
            return NotImplemented
        return Matrix._wrap(self._a @ other._a)

    def __add__(self, other: Matrix) -> Matrix:
        if not isinstance(other, Matrix):
            return NotImplemented
        return Matrix._wrap(self._a + other._a)

    def __sub__(self, other: Matrix) -> Matrix:
        if not isinstance(other, Matrix):
            return NotImplemented
        return Matrix._wrap(self._a - other._a)

    def __neg__(self) -> Matrix:
        return Matrix._wrap(-self._a)

    def __mul__(self, c) -> Matrix:
        if isinstance(c, Matrix):
            return NotImplemented
        return Matrix._wrap(self._a * to_scalar(c))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Matrix:
        base = self if k >= 0 else self.inverse()
        result = Matrix.identity(self.dim)
        for _ in range(abs(k)):
            result = result @ base
        return result

    def trace(self) -> ComplexScalar:
        return sum(self._a[i, i] for i in range(self.dim))

    def max_norm(self) -> float:
        if self._a.size == 0:
            return 0.0
        return float(max(abs(x) for x in self._a.flat))

    def allclose(self, other: Matrix, tol: float) -> bool:
        return self.shape == other.shape and (self - other).max_norm() <= tol

    # factorisations

    def det(self) -> ComplexScalar:
        return det(self)

    def inverse(self) -> Matrix:
        return inverse(self)


def _is_diagonal(a: np.ndarray) -> bool:
    if a.dtype == object:
        return False
    return not np.any(a - np.diag(np.diag(a)))


def _lu(a: np.ndarray):
    """In-place style LU with partial pivoting on a copy.

    Returns (lu, perm, sign, nonsingular).  Stops at the first exactly zero
    pivot column.
    """
    lu = a.copy()
    n = lu.shape[0]
    perm = list(range(n))
    sign = 1
    for k in range(n):
        col = np.abs(lu[k:, k])
        p = k + int(np.argmax(col))
        if col[p - k] == 0:
            return lu, perm, sign, False
        if p != k:
            lu[[k, p], :] = lu[[p, k], :]
            perm[k], perm[p] = perm[p], perm[k]
            sign = -sign
        if k + 1 < n:
            factors = lu[k + 1:, k] / lu[k, k]
            lu[k + 1:, k] = factors
            lu[k + 1:, k + 1:] = lu[k + 1:, k + 1:] - np.outer(factors, lu[k, k + 1:])
    return lu, perm, sign, True


def det(m: Matrix) -> ComplexScalar:
    """Determinant by partial-pivoted elimination; exactly zero when a pivot column vanishes."""
    if not m.is_square():
        raise ValueError(f"determinant of non-square matrix {m.shape}")
    n = m.shape[0]
    if n == 0:
        return to_scalar(1)
    lu, _, sign, ok = _lu(m.entries)
    if not ok:
        return to_scalar(0)
    d = to_scalar(sign)
    for i in range(n):
        d = d * lu[i, i]
    return d


def slogdet(m: Matrix) -> tuple[ComplexScalar, float]:
    """(phase, log|det|) so that det = phase * exp(logabs); overflow-free.

    A singular matrix gives (0, -inf).
    """
    if not m.is_square():
        raise ValueError(f"determinant of non-square matrix {m.shape}")
    n = m.shape[0]
    if n == 0:
        return to_scalar(1), 0.0
    lu, _, sign, ok = _lu(m.entries)
    if not ok:
        return to_scalar(0), float("-inf")
    phase = to_scalar(sign)
    logabs = 0.0
    for i in range(n):
        u = lu[i, i]
        r = abs(u)
        phase = phase * (u / r)
        logabs = logabs + (mpmath.log(r) if isinstance(r, mpmath.mpf) else np.log(r))
    return phase, logabs


def slogdet_checked(
    m: Matrix, rel_threshold: float = RANK_THRESHOLD, scale: float = 0.0
) -> tuple[ComplexScalar, float, bool]:
    """slogdet plus a full-rank decision from the same factorisation.

    Full rank means every LU pivot exceeds ``rel_threshold`` times the
    largest pivot, matrix entry or ``scale``.  Pass the magnitude of the
    inputs as ``scale`` when the matrix may be pure cancellation noise.
    """
    if not m.is_square():
        raise ValueError(f"determinant of non-square matrix {m.shape}")
    if m.shape[0] == 0:
        return to_scalar(1), 0.0, True
    a = m.entries
    if _is_diagonal(a):
        lu, sign, ok = a, 1, all(a[i, i] != 0 for i in range(a.shape[0]))
    else:
        lu, _, sign, ok = _lu(a)
    if not ok:
        return to_scalar(0), float("-inf"), False
    diag = [lu[i, i] for i in range(a.shape[0])]
    mags = [abs(u) for u in diag]
    largest = max(max(mags), np.abs(a).max() if a.dtype != object else max(abs(x) for x in a.flat), scale)
    full = bool(min(mags) > rel_threshold * largest)
    phase = to_scalar(sign)
    logabs = 0.0
    for u, r in zip(diag, mags):
        phase = phase * (u / r)
        logabs = logabs + (mpmath.log(r) if isinstance(r, mpmath.mpf) else np.log(r))
    return phase, float(logabs) if not isinstance(logabs, mpmath.mpf) else logabs, full


def inverse(m: Matrix) -> Matrix:
    if not m.is_square():
        raise ValueError(f"inverse of non-square matrix {m.shape}")
    n = m.shape[0]
    lu, perm, _, ok = _lu(m.entries)
    if not ok:
        raise ZeroDivisionError("matrix is singular")
    b = Matrix.identity(n).entries[perm, :].copy()
    # forward substitution with unit lower triangle
    for i in range(n):
        if i:
            b[i, :] = b[i, :] - lu[i, :i] @ b[:i, :]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            b[i, :] = b[i, :] - lu[i, i + 1:] @ b[i + 1:, :]
        b[i, :] = b[i, :] / lu[i, i]
    return Matrix._wrap(b)


def pivot_columns(m: Matrix, rel_threshold: float = RANK_THRESHOLD, scale: float = 0.0) -> list[int]:
    """Greedy pivot columns of a row-echelon reduction.

    A column is kept when its best remaining pivot exceeds ``rel_threshold``
    times the largest magnitude seen so far (matrix entries, pivots or
    ``scale``).  The kept columns span the column space, so they give a lift
    basis for the image.
    """
    a = m.entries.copy()
    rows, cols = a.shape
    if a.size == 0:
        return []
    largest = np.abs(a).max() if a.dtype != object else max(abs(x) for x in a.flat)
    largest = max(largest, scale)
    if largest == 0:
        return []
    pivots: list[int] = []
    r = 0
    for j in range(cols):
        if r == rows:
            break
        col = np.abs(a[r:, j])
        p = r + int(np.argmax(col))
        val = col[p - r]
        if val <= rel_threshold * largest:
            continue
        largest = max(largest, val)
        if p != r:
            a[[r, p], :] = a[[p, r], :]
        if r + 1 < rows:
            factors = a[r + 1:, j] / a[r, j]
            a[r + 1:, j:] = a[r + 1:, j:] - np.outer(factors, a[r, j:])
        pivots.append(j)
        r += 1
    return pivots


def rank(m: Matrix, rel_threshold: float = RANK_THRESHOLD, scale: float = 0.0) -> int:
    return len(pivot_columns(m, rel_threshold, scale))


def matrix_from_pairs(pairs: Sequence[Sequence[float]], dim: int) -> Matrix:
    """Inverse of :func:`matrix_to_pairs`: row-major [re, im] pairs."""
    if len(pairs) != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, got {len(pairs)}")
    vals = [complex(re, im) for re, im in pairs]
    return Matrix([vals[i * dim:(i + 1) * dim] for i in range(dim)])


def matrix_to_pairs(m: Matrix) -> list[list[float]]:
    return [[float(mpmath.re(z)), float(mpmath.im(z))] for z in m.entries.flat]
