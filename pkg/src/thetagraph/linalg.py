"""Dense matrices over a scalar backend and subspace machinery.

Everything structural in the package reduces to row reduction of
flattened (row-major) matrices, so the same kernel serves spans, algebras,
commutants and kernels.  Exact matrices are reduced with literal zero tests;
float matrices use pivoting with a threshold relative to the largest input
row norm.
"""

from __future__ import annotations

import math
import numbers
from typing import Iterable, Sequence

import numpy as np

from .scalars import (
    DEFAULT_TOL,
    EXACT,
    FLOAT,
    BackendMismatch,
    QQi,
    backend_of,
    is_zero,
    one,
    to_backend,
    zero,
)


def _infer_backend(values: Iterable) -> str:
    found = None
    for v in values:
        b = backend_of(v)
        if b is None:
            continue
        if found is None:
            found = b
        elif b != found:
            raise BackendMismatch()
    return found or EXACT


class CMatrix:
    """Immutable dense matrix whose entries all share one backend.

    Entries are stored as a tuple of row tuples; exact entries are
    :class:`QQi`, float entries are :class:`complex`.
    """

    __slots__ = ("rows", "shape", "backend")

    def __init__(self, rows: Sequence[Sequence], backend: str | None = None):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix rows")
        if backend is None:
            backend = _infer_backend(v for r in rows for v in r)
        self.rows = tuple(tuple(to_backend(v, backend) for v in r) for r in rows)
        self.shape = (len(rows), ncols)
        self.backend = backend

    @classmethod
    def _trusted(cls, rows, backend: str) -> CMatrix:
        obj = cls.__new__(cls)
        obj.rows = tuple(tuple(r) for r in rows)
        obj.shape = (len(obj.rows), len(obj.rows[0]))
        obj.backend = backend
        return obj

    # constructors
    @classmethod
    def identity(cls, n: int, backend: str = EXACT) -> CMatrix:
        o, z = one(backend), zero(backend)
        return cls._trusted([[o if i == j else z for j in range(n)] for i in range(n)], backend)

    @classmethod
    def zeros(cls, nrows: int, ncols: int | None = None, backend: str = EXACT) -> CMatrix:
        ncols = nrows if ncols is None else ncols
        z = zero(backend)
        return cls._trusted([[z] * ncols for _ in range(nrows)], backend)

    @classmethod
    def unit(cls, i: int, j: int, nrows: int, ncols: int | None = None, backend: str = EXACT) -> CMatrix:
        """Matrix unit |i><j| (0-based)."""
        ncols = nrows if ncols is None else ncols
        z, o = zero(backend), one(backend)
        return cls._trusted(
            [[o if (r, c) == (i, j) else z for c in range(ncols)] for r in range(nrows)], backend
        )

    @classmethod
    def from_flat(cls, vec: Sequence, shape: tuple[int, int], backend: str) -> CMatrix:
        r, c = shape
        return cls._trusted([vec[i * c:(i + 1) * c] for i in range(r)], backend)

    @classmethod
    def from_numpy(cls, arr) -> CMatrix:
        arr = np.asarray(arr, dtype=complex)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        return cls._trusted([[complex(v) for v in row] for row in arr], FLOAT)

    # basic properties
    @property
    def nrows(self) -> int:
        return self.shape[0]

    @property
    def ncols(self) -> int:
        return self.shape[1]

    @property
    def dim(self) -> int:
        if self.shape[0] != self.shape[1]:
            raise ValueError(f"matrix of shape {self.shape} is not square")
        return self.shape[0]

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def flat(self) -> tuple:
        return tuple(v for r in self.rows for v in r)

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(v) for v in r] for r in self.rows], dtype=complex)

    def to_backend(self, backend: str) -> CMatrix:
        if backend == self.backend:
            return self
        return CMatrix._trusted([[to_backend(v, backend) for v in r] for r in self.rows], backend)

    # arithmetic
    def _check(self, other: CMatrix, same_shape: bool = True):
        if not isinstance(other, CMatrix):
            raise TypeError(f"expected CMatrix, got {type(other).__name__}")
        if other.backend != self.backend:
            raise BackendMismatch()
        if same_shape and other.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: CMatrix) -> CMatrix:
        self._check(other)
        return CMatrix._trusted(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)], self.backend
        )

    def __sub__(self, other: CMatrix) -> CMatrix:
        self._check(other)
        return CMatrix._trusted(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)], self.backend
        )

    def __neg__(self) -> CMatrix:
        return CMatrix._trusted([[-a for a in r] for r in self.rows], self.backend)

    def scale(self, s) -> CMatrix:
        s = to_backend(s, self.backend)
        return CMatrix._trusted([[s * a for a in r] for r in self.rows], self.backend)

    def __mul__(self, s):
        if isinstance(s, CMatrix):
            raise TypeError("use @ for matrix products")
        if not isinstance(s, numbers.Number):
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def __truediv__(self, s) -> CMatrix:
        return self.scale(1 / to_backend(s, self.backend))

    def __matmul__(self, other: CMatrix) -> CMatrix:
        self._check(other, same_shape=False)
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        z = zero(self.backend)
        # sparse over the columns of ``other``: most structured matrices here
        # are permutation-like
        cols = [[(k, b) for k, b in enumerate(c) if b] for c in zip(*other.rows)]
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = z
                for k, b in c:
                    a = r[k]
                    if a:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return CMatrix._trusted(out, self.backend)

    def __pow__(self, n: int) -> CMatrix:
        out = CMatrix.identity(self.dim, self.backend)
        for _ in range(n):
            out = out @ self
        return out

    def transpose(self) -> CMatrix:
        return CMatrix._trusted(list(zip(*self.rows)), self.backend)

    def conj(self) -> CMatrix:
        return CMatrix._trusted([[a.conjugate() for a in r] for r in self.rows], self.backend)

    def adjoint(self) -> CMatrix:
        return CMatrix._trusted([[a.conjugate() for a in c] for c in zip(*self.rows)], self.backend)

    @property
    def H(self) -> CMatrix:
        return self.adjoint()

    def trace(self):
        acc = zero(self.backend)
        for i in range(self.dim):
            acc = acc + self.rows[i][i]
        return acc

    def commutator(self, other: CMatrix) -> CMatrix:
        return self @ other - other @ self

    # comparisons
    def max_abs(self) -> float:
        return max(abs(v) for r in self.rows for v in r)

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return all(is_zero(v, tol) for r in self.rows for v in r)

    def allclose(self, other: CMatrix, tol: float = DEFAULT_TOL) -> bool:
        return (self - other).is_zero(tol)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CMatrix):
            return NotImplemented
        return self.backend == other.backend and self.rows == other.rows

    def __hash__(self):
        return hash((self.backend, self.rows))

    def __repr__(self) -> str:
        from .scalars import format_scalar

        body = "; ".join(", ".join(format_scalar(v, 6) for v in r) for r in self.rows)
        return f"CMatrix[{self.backend}]({body})"


def kron(a: CMatrix, b: CMatrix) -> CMatrix:
    if a.backend != b.backend:
        raise BackendMismatch()
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            rows.append([x * y for x in ra for y in rb])
    return CMatrix._trusted(rows, a.backend)


def hstack(mats: Sequence[CMatrix]) -> CMatrix:
    backend = mats[0].backend
    return CMatrix._trusted(
        [sum((list(m.rows[i]) for m in mats), []) for i in range(mats[0].nrows)], backend
    )


def column(vec: Sequence, backend: str) -> CMatrix:
    return CMatrix._trusted([[to_backend(v, backend)] for v in vec], backend)


def residual(m: CMatrix) -> float:
    """Max-abs entry as a float (exactly ``0.0`` for an exact zero matrix)."""
    return float(m.max_abs())


# ---------------------------------------------------------------------------
# row reduction on plain vectors

def _norm(vec) -> float:
    return math.sqrt(sum(abs(v) ** 2 for v in vec))


def rref(rows: Sequence[Sequence], ncols: int, backend: str, tol: float = DEFAULT_TOL):
    """Reduced row echelon form.

    Returns ``(reduced_rows, pivot_columns)``; only the first
    ``len(pivot_columns)`` rows are nonzero.  Float rows use partial pivoting
    and treat entries below ``tol * max_row_norm`` as zero.
    """
    work = [list(r) for r in rows]
    exact = backend == EXACT
    thresh = 0.0 if exact else tol * max((_norm(r) for r in work), default=0.0)
    pivots: list[int] = []
    prow = 0
    m = len(work)
    for col in range(ncols):
        if prow == m:
            break
        if exact:
            best = next((r for r in range(prow, m) if work[r][col]), None)
        else:
            best = max(range(prow, m), key=lambda r: abs(work[r][col]))
            if abs(work[best][col]) <= thresh:
                best = None
        if best is None:
            continue
        work[prow], work[best] = work[best], work[prow]
        inv = 1 / work[prow][col]
        work[prow] = [v * inv for v in work[prow]]
        pr = work[prow]
        for r in range(m):
            if r != prow:
                f = work[r][col]
                if f:
                    work[r] = [a - f * b for a, b in zip(work[r], pr)]
        if not exact:
            for r in range(prow + 1, m):
                work[r][col] = 0j
        pivots.append(col)
        prow += 1
    return work, pivots


def rank(rows: Sequence[Sequence], ncols: int, backend: str, tol: float = DEFAULT_TOL) -> int:
    return len(rref(rows, ncols, backend, tol)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, backend: str, tol: float = DEFAULT_TOL) -> list[list]:
    """Basis of ``{v : rows @ v = 0}`` as plain lists of scalars."""
    z, o = zero(backend), one(backend)
    if not rows:
        return [[o if i == j else z for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows, ncols, backend, tol)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [z] * ncols
        v[f] = o
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(v)
    return basis


def solve(a: CMatrix, b: CMatrix, tol: float = DEFAULT_TOL) -> CMatrix | None:
    """One solution of ``a @ x = b`` or ``None`` if the system is inconsistent."""
    if a.backend != b.backend:
        raise BackendMismatch()
    n, k = a.ncols, b.ncols
    aug = [list(ra) + list(rb) for ra, rb in zip(a.rows, b.rows)]
    red, pivots = rref(aug, n, a.backend, tol)
    z = zero(a.backend)
    # consistency: rows without a pivot must have a zero right-hand side
    scale = max(1.0, b.max_abs())
    for r in range(len(pivots), len(red)):
        if not all(is_zero(v, tol * scale) for v in red[r][n:]):
            return None
    x = [[z] * k for _ in range(n)]
    for r, p in enumerate(pivots):
        x[p] = red[r][n:]
    return CMatrix._trusted(x, a.backend)


def inverse(a: CMatrix, tol: float = DEFAULT_TOL) -> CMatrix:
    n = a.dim
    red, pivots = rref(
        [list(r) + list(e) for r, e in zip(a.rows, CMatrix.identity(n, a.backend).rows)], n, a.backend, tol
    )
    if len(pivots) != n:
        raise ZeroDivisionError("matrix is singular")
    return CMatrix._trusted([r[n:] for r in red], a.backend)


# ---------------------------------------------------------------------------
# incremental echelon basis

class Echelon:
    """Incrementally built echelon basis with coordinate tracking.

    Each stored row is ``1`` at its pivot and zero at every earlier pivot.
    ``combos[k]`` expresses stored row ``k`` in terms of the accepted input
    vectors, which lets :meth:`coordinates` answer in the caller's basis.
    """

    def __init__(self, length: int, backend: str, tol: float = DEFAULT_TOL):
        self.length = length
        self.backend = backend
        self.tol = tol
        self.pivots: list[int] = []
        self.rows: list[list] = []
        self.combos: list[list] = []
        self.scale = 0.0

    def __len__(self) -> int:
        return len(self.rows)

    def _reduce(self, vec):
        v = [to_backend(x, self.backend) for x in vec]
        coeffs = []
        for p, row in zip(self.pivots, self.rows):
            f = v[p]
            coeffs.append(f)
            if f:
                v = [a - f * b if b else a for a, b in zip(v, row)]
        return v, coeffs

    def _is_null(self, v, extra_norm: float = 0.0) -> bool:
        if self.backend == EXACT:
            return not any(v)
        thresh = self.tol * max(self.scale, extra_norm)
        return max((abs(x) for x in v), default=0.0) <= thresh

    def contains(self, vec) -> bool:
        v, _ = self._reduce(vec)
        return self._is_null(v, _norm(vec))

    def coordinates(self, vec) -> list | None:
        """Coefficients of ``vec`` over the accepted inputs, or ``None``."""
        v, coeffs = self._reduce(vec)
        if not self._is_null(v, _norm(vec)):
            return None
        z = zero(self.backend)
        out = [z] * len(self.rows)
        for c, combo in zip(coeffs, self.combos):
            if c:
                out = [a + c * b for a, b in zip(out, combo)]
        return out

    def insert(self, vec) -> bool:
        """Add ``vec`` if independent; return whether it was added."""
        norm = _norm(vec) if self.backend == FLOAT else 0.0
        v, coeffs = self._reduce(vec)
        if self._is_null(v, norm):
            return False
        self.scale = max(self.scale, norm)
        if self.backend == EXACT:
            p = next(i for i, x in enumerate(v) if x)
        else:
            p = max(range(self.length), key=lambda i: abs(v[i]))
        inv = 1 / v[p]
        row = [x * inv for x in v]
        if self.backend == FLOAT:
            row[p] = 1 + 0j
        n = len(self.rows)
        z = zero(self.backend)
        combo = [z] * (n + 1)
        combo[n] = inv
        for c, old in zip(coeffs, self.combos):
            if c:
                for i, b in enumerate(old):
                    combo[i] = combo[i] - c * inv * b
        for old in self.combos:
            old.append(z)
        self.pivots.append(p)
        self.rows.append(row)
        self.combos.append(combo)
        return True


# ---------------------------------------------------------------------------
# subspaces of matrices

class Subspace:
    """Span of linearly independent matrices of a common shape."""

    def __init__(self, basis: Sequence[CMatrix], shape: tuple[int, int] | None = None,
                 backend: str | None = None, tol: float = DEFAULT_TOL):
        basis = list(basis)
        if basis:
            shape = basis[0].shape
            backend = basis[0].backend
        if shape is None:
            raise ValueError("empty subspace needs an explicit shape")
        self.shape = shape
        self.backend = backend or EXACT
        self.tol = tol
        self._ech = Echelon(shape[0] * shape[1], self.backend, tol)
        self.basis: list[CMatrix] = []
        for m in basis:
            if m.shape != shape or m.backend != self.backend:
                raise BackendMismatch("subspace basis must share shape and backend")
            if not self._ech.insert(m.flat()):
                raise ValueError("basis is linearly dependent")
            self.basis.append(m)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return self.dim

    def __iter__(self):
        return iter(self.basis)

    def contains(self, m: CMatrix) -> bool:
        if m.shape != self.shape:
            return False
        return self._ech.contains(m.to_backend(self.backend).flat())

    __contains__ = contains

    def coordinates(self, m: CMatrix) -> list | None:
        return self._ech.coordinates(m.to_backend(self.backend).flat())

    def combine(self, coeffs: Sequence) -> CMatrix:
        acc = CMatrix.zeros(*self.shape, backend=self.backend)
        for c, b in zip(coeffs, self.basis):
            if c:
                acc = acc + b.scale(c)
        return acc

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, shape={self.shape}, backend={self.backend})"


def span_basis(mats: Sequence[CMatrix], tol: float = DEFAULT_TOL, shape: tuple[int, int] | None = None,
               backend: str | None = None) -> Subspace:
    """Greedy maximal independent subset of ``mats`` (span preserved)."""
    mats = list(mats)
    if not mats:
        return Subspace([], shape or (1, 1), backend, tol)
    shape, backend = mats[0].shape, mats[0].backend
    ech = Echelon(shape[0] * shape[1], backend, tol)
    keep = []
    for m in mats:
        if m.shape != shape or m.backend != backend:
            raise BackendMismatch("span_basis needs one shape and backend")
        if ech.insert(m.flat()):
            keep.append(m)
    return Subspace(keep, shape, backend, tol)


def subspace_equal(a: Subspace, b: Subspace, tol: float = DEFAULT_TOL) -> bool:
    if a.shape != b.shape:
        raise ValueError("subspaces live in different ambient spaces")
    joint = span_basis(a.basis + b.basis, tol, a.shape, a.backend)
    return a.dim == b.dim == joint.dim


def solve_homogeneous(constraints: CMatrix, tol: float = DEFAULT_TOL) -> Subspace:
    """Kernel of a linear map, as a subspace of column vectors."""
    vecs = nullspace(constraints.rows, constraints.ncols, constraints.backend, tol)
    return Subspace([column(v, constraints.backend) for v in vecs], (constraints.ncols, 1),
                    constraints.backend, tol)


def column_space(m: CMatrix, tol: float = DEFAULT_TOL) -> list[list]:
    """Independent columns of ``m`` (as lists) spanning its range."""
    cols = [list(c) for c in zip(*m.rows)]
    ech = Echelon(m.nrows, m.backend, tol)
    return [c for c in cols if ech.insert(c)]
