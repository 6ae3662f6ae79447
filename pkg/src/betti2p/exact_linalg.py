"""Dense linear algebra over a prime field GF(p).

Matrices are small (tens of rows/columns) so everything is dense numpy
``int64`` with entries kept in ``[0, p)``.  Every routine goes through
:func:`column_reduce`, a deterministic Gauss-Jordan elimination on columns
(pivot = first nonzero entry, ties broken by lowest column index), so
echelon forms and bases are reproducible run to run.

Zero-dimensional spaces are ordinary ``0 x n`` / ``n x 0`` matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when matrix shapes (or fields) do not line up."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field GF(p)."""

    modulus: int

    def __post_init__(self):
        if not isinstance(self.modulus, (int, np.integer)) or not _is_prime(int(self.modulus)):
            raise ValueError(f"field modulus must be prime, got {self.modulus!r}")
        # int64 products of two reduced entries must not overflow
        if self.modulus >= 3_000_000_000:
            raise ValueError("modulus too large for int64 arithmetic")
        object.__setattr__(self, "modulus", int(self.modulus))

    @property
    def p(self) -> int:
        return self.modulus

    def inv(self, a: int) -> int:
        a = int(a) % self.modulus
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, -1, self.modulus)

    def __str__(self):
        return f"GF({self.modulus})"


class DenseMatrix:
    """Immutable ``rows x cols`` matrix over a :class:`PrimeField`.

    The underlying array is read-only; use :meth:`to_array` for a mutable copy.
    """

    __slots__ = ("field", "_a")

    def __init__(self, data, field: PrimeField, shape: tuple[int, int] | None = None):
        if isinstance(data, DenseMatrix):
            data = data._a
        a = np.asarray(data, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        elif a.ndim == 1 and a.size == 0:
            a = a.reshape(0, 0)
        if a.ndim != 2:
            raise DimensionError(f"expected a 2-d array, got shape {a.shape}")
        a = np.mod(a, field.modulus)
        a.setflags(write=False)
        self.field = field
        self._a = a

    # -- constructors -------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int, field: PrimeField) -> DenseMatrix:
        return cls(np.zeros((rows, cols), dtype=np.int64), field)

    @classmethod
    def identity(cls, n: int, field: PrimeField) -> DenseMatrix:
        return cls(np.eye(n, dtype=np.int64), field)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], field: PrimeField, cols: int | None = None) -> DenseMatrix:
        rows = [list(r) for r in rows]
        if not rows:
            return cls.zeros(0, cols or 0, field)
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged rows")
        return cls(rows, field)

    @classmethod
    def column(cls, entries: Iterable[int], field: PrimeField) -> DenseMatrix:
        e = list(entries)
        return cls(np.array(e, dtype=np.int64).reshape(len(e), 1), field)

    # -- basic protocol -----------------------------------------------------
    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    def to_array(self) -> np.ndarray:
        return self._a.copy()

    def to_lists(self) -> list[list[int]]:
        return self._a.tolist()

    def is_zero(self) -> bool:
        return not self._a.any()

    def __getitem__(self, idx):
        return self._a[idx]

    def __eq__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and np.array_equal(self._a, other._a)

    __hash__ = None

    def __repr__(self):
        return f"DenseMatrix({self.to_lists()!r}, {self.field}, shape={self.shape})"

    def __matmul__(self, other: DenseMatrix) -> DenseMatrix:
        return mat_mul(self, other)

    def __add__(self, other: DenseMatrix) -> DenseMatrix:
        _check_same(self, other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return DenseMatrix(self._a + other._a, self.field)

    def __sub__(self, other: DenseMatrix) -> DenseMatrix:
        _check_same(self, other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {self.shape} and {other.shape}")
        return DenseMatrix(self._a - other._a, self.field)

    def __neg__(self) -> DenseMatrix:
        return DenseMatrix(-self._a, self.field)

    def scale(self, c: int) -> DenseMatrix:
        return DenseMatrix(self._a * (int(c) % self.field.modulus), self.field)

    @property
    def T(self) -> DenseMatrix:
        return DenseMatrix(self._a.T, self.field)

    def take_columns(self, idx: Sequence[int]) -> DenseMatrix:
        return DenseMatrix(self._a[:, list(idx)].reshape(self.rows, len(idx)), self.field)

    def take_rows(self, idx: Sequence[int]) -> DenseMatrix:
        return DenseMatrix(self._a[list(idx), :].reshape(len(idx), self.cols), self.field)


def _check_same(a: DenseMatrix, b: DenseMatrix) -> None:
    if a.field != b.field:
        raise DimensionError(f"field mismatch: {a.field} vs {b.field}")


def mat_mul(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    """Exact product ``a @ b`` mod p."""
    _check_same(a, b)
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    p = a.field.modulus
    if p < 3_037_000_499 and a.cols * (p - 1) ** 2 < 2**62:
        return DenseMatrix(a.array @ b.array, a.field)
    # fall back to object arithmetic for very large moduli
    prod = a.array.astype(object) @ b.array.astype(object)
    return DenseMatrix(np.mod(prod, p).astype(np.int64), a.field)


def hstack(mats: Sequence[DenseMatrix], rows: int | None = None, field: PrimeField | None = None) -> DenseMatrix:
    """Concatenate columns; ``rows``/``field`` are needed only when ``mats`` is empty."""
    if not mats:
        return DenseMatrix.zeros(rows or 0, 0, field)
    f = mats[0].field
    for m in mats:
        _check_same(mats[0], m)
        if m.rows != mats[0].rows:
            raise DimensionError("hstack row mismatch")
    return DenseMatrix(np.hstack([m.array for m in mats]), f)


def vstack(mats: Sequence[DenseMatrix], cols: int | None = None, field: PrimeField | None = None) -> DenseMatrix:
    if not mats:
        return DenseMatrix.zeros(0, cols or 0, field)
    f = mats[0].field
    for m in mats:
        _check_same(mats[0], m)
        if m.cols != mats[0].cols:
            raise DimensionError("vstack column mismatch")
    return DenseMatrix(np.vstack([m.array for m in mats]), f)


def block_diag(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    _check_same(a, b)
    out = np.zeros((a.rows + b.rows, a.cols + b.cols), dtype=np.int64)
    out[: a.rows, : a.cols] = a.array
    out[a.rows :, a.cols :] = b.array
    return DenseMatrix(out, a.field)


def _reduce(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Gauss-Jordan on columns.  Returns (reduced, basis_change, pivot_rows)."""
    A = a.copy()
    m, n = A.shape
    T = np.eye(n, dtype=np.int64)
    pivot_rows: list[int] = []
    r = 0
    for i in range(m):
        if r == n:
            break
        nz = np.flatnonzero(A[i, r:])
        if nz.size == 0:
            continue
        j = r + int(nz[0])
        if j != r:
            A[:, [r, j]] = A[:, [j, r]]
            T[:, [r, j]] = T[:, [j, r]]
        inv = pow(int(A[i, r]), -1, p)
        if inv != 1:
            A[:, r] = (A[:, r] * inv) % p
            T[:, r] = (T[:, r] * inv) % p
        f = A[i, :].copy()
        f[r] = 0
        if f.any():
            A -= np.outer(A[:, r], f)
            A %= p
            T -= np.outer(T[:, r], f)
            T %= p
        pivot_rows.append(i)
        r += 1
    return A, T, pivot_rows


def column_reduce(a: DenseMatrix) -> tuple[DenseMatrix, int, DenseMatrix]:
    """Reduced column-echelon form.

    Returns ``(reduced, rank, basis_change)`` with ``reduced == a @ basis_change``,
    ``basis_change`` invertible, the first ``rank`` columns of ``reduced`` nonzero
    and the rest zero.  Each pivot row carries a single 1 among the nonzero
    columns.
    """
    A, T, piv = _reduce(a.array, a.field.modulus)
    return DenseMatrix(A, a.field), len(piv), DenseMatrix(T, a.field)


def rank(a: DenseMatrix) -> int:
    if a.rows == 0 or a.cols == 0:
        return 0
    return len(_reduce(a.array, a.field.modulus)[2])


def kernel_basis(a: DenseMatrix) -> DenseMatrix:
    """Columns spanning the null space of ``a``; exactly ``a.cols - rank(a)`` of them."""
    _, T, piv = _reduce(a.array, a.field.modulus)
    return DenseMatrix(T[:, len(piv) :], a.field)


def image_basis(a: DenseMatrix) -> DenseMatrix:
    """Columns spanning the column space of ``a`` (reduced echelon, ``rank(a)`` columns)."""
    A, _, piv = _reduce(a.array, a.field.modulus)
    return DenseMatrix(A[:, : len(piv)], a.field)


def solve_matrix(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix | None:
    """Some ``x`` with ``a @ x == b``, or ``None`` if a column of ``b`` is outside col(a)."""
    _check_same(a, b)
    if b.rows != a.rows:
        raise DimensionError(f"right-hand side has {b.rows} rows, expected {a.rows}")
    p = a.field.modulus
    A, T, piv = _reduce(a.array, p)
    r = len(piv)
    coeffs = b.array[piv, :]  # reduced echelon: pivot row i of column k is delta
    if not np.array_equal((A[:, :r] @ coeffs) % p, b.array):
        return None
    return DenseMatrix(T[:, :r] @ coeffs, a.field)


def solve(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix | None:
    """Solve ``a @ x == b`` for a single column ``b``; ``None`` when inconsistent."""
    if b.cols != 1:
        raise DimensionError("solve expects a column vector; use solve_matrix")
    return solve_matrix(a, b)


def cokernel_reps(sub: DenseMatrix, ambient_dim: int) -> DenseMatrix:
    """Standard basis vectors completing col(sub) to a basis of the ambient space.

    ``sub`` need not have independent columns; the chosen vectors are the unit
    vectors at the non-pivot rows of the column-echelon form of ``sub``.
    """
    if sub.rows != ambient_dim:
        raise DimensionError(f"sub has {sub.rows} rows, ambient dimension is {ambient_dim}")
    _, _, piv = _reduce(sub.array, sub.field.modulus)
    free = [i for i in range(ambient_dim) if i not in set(piv)]
    out = np.zeros((ambient_dim, len(free)), dtype=np.int64)
    for k, i in enumerate(free):
        out[i, k] = 1
    return DenseMatrix(out, sub.field)


def intersect_subspaces(u: DenseMatrix, v: DenseMatrix) -> DenseMatrix:
    """Basis of col(u) ∩ col(v)."""
    _check_same(u, v)
    if u.rows != v.rows:
        raise DimensionError(f"ambient mismatch: {u.rows} vs {v.rows}")
    if u.cols == 0 or v.cols == 0:
        return DenseMatrix.zeros(u.rows, 0, u.field)
    ker = kernel_basis(hstack([u, -v]))
    common = u @ ker.take_rows(range(u.cols))
    return image_basis(common)


def subspace_sum(u: DenseMatrix, v: DenseMatrix) -> DenseMatrix:
    return image_basis(hstack([u, v]))


def contains(big: DenseMatrix, small: DenseMatrix) -> bool:
    """True when every column of ``small`` lies in col(``big``)."""
    if small.cols == 0:
        return True
    return rank(hstack([big, small])) == rank(big)


def is_invertible(a: DenseMatrix) -> bool:
    return a.rows == a.cols and rank(a) == a.rows
