"""Finite-dimensional matrix algebras: closure, center, radical, blocks.

The radical is computed with the characteristic-zero trace criterion:
``rad A = {a in A : tr(a b) = 0 for all b in A}``.  That set is a two-sided
ideal whose elements satisfy ``tr(a^k) = 0`` for ``k >= 2``, hence it is nil
and contains every nilpotent ideal, so one pass suffices (no iteration).

Block decomposition splits a semisimple algebra with the central idempotents
obtained from the spectral projections of a random central element.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .linalg import CMatrix, Echelon, Subspace, nullspace, residual, solve, span_basis
from .scalars import DEFAULT_TOL, EXACT, FLOAT, QQi, one, to_backend, zero


class DecompositionError(RuntimeError):
    pass


@dataclass
class MatrixAlgebra:
    """Basis of a multiplicatively closed matrix subspace plus structure constants.

    ``structure_constants[i][j][k]`` is the coefficient of ``basis[k]`` in
    ``basis[i] @ basis[j]``.
    """

    basis: list[CMatrix]
    structure_constants: list
    contains_identity: bool
    tol: float = DEFAULT_TOL
    space: Subspace = field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis[0].nrows if self.basis else 0

    @property
    def backend(self) -> str:
        return self.space.backend

    def element(self, coeffs: Sequence) -> CMatrix:
        return self.space.combine(coeffs)

    def coordinates(self, m: CMatrix):
        return self.space.coordinates(m)

    @classmethod
    def from_basis(cls, basis: Sequence[CMatrix], tol: float = DEFAULT_TOL) -> MatrixAlgebra:
        """Wrap an independent, multiplicatively closed list of matrices."""
        space = Subspace(basis, tol=tol)
        sc = []
        for a in space.basis:
            row = []
            for b in space.basis:
                coords = space.coordinates(a @ b)
                if coords is None:
                    raise ValueError("basis is not closed under multiplication")
                row.append(coords)
            sc.append(row)
        n = space.shape[0]
        has_one = space.contains(CMatrix.identity(n, space.backend)) if space.dim else False
        return cls(list(space.basis), sc, has_one, tol, space)


def _normalized(m: CMatrix) -> CMatrix:
    if m.backend == EXACT:
        return m
    s = m.max_abs()
    return m / s if s > 0 else m


def generate_algebra(gens: Sequence[CMatrix], include_identity: bool = True,
                     tol: float = DEFAULT_TOL) -> MatrixAlgebra:
    """Smallest algebra containing ``gens`` (and I when requested).

    Each round multiplies every pair of current basis elements and keeps the
    products that enlarge the span, until a round adds nothing or the span
    fills the full matrix space.
    """
    gens = list(gens)
    if not gens and not include_identity:
        raise ValueError("no generators")
    n = gens[0].nrows if gens else None
    backend = gens[0].backend if gens else EXACT
    start = list(gens)
    if include_identity:
        if n is None:
            raise ValueError("identity-only algebra needs a dimension; pass [I]")
        start.append(CMatrix.identity(n, backend))
    ech = Echelon(n * n, backend, tol)
    basis = []
    for m in start:
        m = _normalized(m)
        if ech.insert(m.flat()):
            basis.append(m)
    full = n * n
    while len(basis) < full:
        grew = False
        current = list(basis)
        for a in current:
            for b in current:
                p = _normalized(a @ b)
                if ech.insert(p.flat()):
                    basis.append(p)
                    grew = True
                    if len(basis) == full:
                        break
            if len(basis) == full:
                break
        if not grew:
            break
    return MatrixAlgebra.from_basis(basis, tol)


def associativity_defect(alg: MatrixAlgebra) -> float:
    """Max |(b_i b_j) b_k - b_i (b_j b_k)| measured on structure constants."""
    c = alg.structure_constants
    d = alg.dimension
    z = zero(alg.backend)
    nz = [[[(m, v) for m, v in enumerate(c[i][j]) if v] for j in range(d)] for i in range(d)]

    def combo(terms, rows):
        acc = [z] * d
        for m, v in terms:
            acc = [a + v * b if b else a for a, b in zip(acc, rows(m))]
        return acc

    worst = 0.0
    for i in range(d):
        for j in range(d):
            for k in range(d):
                lhs = combo(nz[i][j], lambda m: c[m][k])
                rhs = combo(nz[j][k], lambda m: c[i][m])
                for a, b in zip(lhs, rhs):
                    worst = max(worst, float(abs(a - b)))
    return worst


def regular_matrices(structure_constants, backend: str) -> list[CMatrix]:
    """Left-regular representation: ``L_i[k][j] = c[i][j][k]``."""
    d = len(structure_constants)
    out = []
    for i in range(d):
        rows = [[to_backend(structure_constants[i][j][k], backend) for j in range(d)] for k in range(d)]
        out.append(CMatrix._trusted(rows, backend))
    return out


def center(alg: MatrixAlgebra, tol: float | None = None) -> Subspace:
    """Elements of the algebra commuting with every basis element."""
    tol = alg.tol if tol is None else tol
    c = alg.structure_constants
    d = alg.dimension
    rows = []
    for j in range(d):
        for k in range(d):
            rows.append([c[i][j][k] - c[j][i][k] for i in range(d)])
    vecs = nullspace(rows, d, alg.backend, tol)
    return span_basis([alg.element(v) for v in vecs], tol, alg.space.shape, alg.backend)


def radical(alg: MatrixAlgebra, tol: float | None = None) -> Subspace:
    """Kernel of the trace form ``(a, b) -> tr(a b)`` restricted to the algebra."""
    tol = alg.tol if tol is None else tol
    gram = [[(a @ b).trace() for b in alg.basis] for a in alg.basis]
    vecs = nullspace(gram, alg.dimension, alg.backend, tol)
    return span_basis([alg.element(v) for v in vecs], tol, alg.space.shape, alg.backend)


def quotient_algebra(alg: MatrixAlgebra, ideal: Subspace) -> MatrixAlgebra:
    """``alg / ideal`` realized by its left-regular representation."""
    n_flat = alg.space.shape[0] * alg.space.shape[1]
    ech = Echelon(n_flat, alg.backend, alg.tol)
    for b in ideal.basis:
        ech.insert(b.flat())
    comp = [b for b in alg.basis if ech.insert(b.flat())]
    full = Subspace(list(ideal.basis) + comp, tol=alg.tol)
    r, m = ideal.dim, len(comp)
    sc = []
    for a in comp:
        row = []
        for b in comp:
            coords = full.coordinates(a @ b)
            row.append(coords[r:r + m])
        sc.append(row)
    return MatrixAlgebra.from_basis(regular_matrices(sc, alg.backend), alg.tol)


def algebra_unit(alg: MatrixAlgebra) -> CMatrix:
    """The unit element of the algebra (may differ from the ambient identity)."""
    n = alg.ambient_dim
    if alg.contains_identity:
        return CMatrix.identity(n, alg.backend)
    c = alg.structure_constants
    d = alg.dimension
    rows, rhs = [], []
    o, z = one(alg.backend), zero(alg.backend)
    for j in range(d):
        for k in range(d):
            rows.append([c[i][j][k] for i in range(d)])
            rhs.append([o if j == k else z])
            rows.append([c[j][i][k] for i in range(d)])
            rhs.append([o if j == k else z])
    sol = solve(CMatrix._trusted(rows, alg.backend), CMatrix._trusted(rhs, alg.backend), alg.tol)
    if sol is None:
        raise DecompositionError("algebra has no unit element")
    return alg.element([r[0] for r in sol.rows])


def minimal_polynomial(c: CMatrix, unit: CMatrix, tol: float = DEFAULT_TOL) -> list:
    """Monic minimal polynomial of ``c`` (coefficients low -> high degree)."""
    ech = Echelon(c.nrows * c.ncols, c.backend, tol)
    powers = [unit]
    ech.insert(unit.flat())
    while True:
        nxt = powers[-1] @ c
        coords = ech.coordinates(nxt.flat())
        if coords is not None:
            return [-a for a in coords] + [one(c.backend)]
        ech.insert(nxt.flat())
        powers.append(nxt)


def _poly_eval(poly, x):
    acc = zero(EXACT) if isinstance(x, QQi) else 0j
    for a in reversed(poly):
        acc = acc * x + a
    return acc


def exact_roots(poly: Sequence[QQi]) -> list[QQi] | None:
    """All roots of a squarefree polynomial over Q(i) if they lie in Q(i).

    Clearing denominators gives Gaussian-integer coefficients with real
    leading coefficient ``L``; any root ``r`` in Q(i) then has ``L*r`` in
    Z[i].  Numerical roots are rounded on that lattice and verified exactly.
    """
    degree = len(poly) - 1
    L = 1
    for a in poly:
        L = L * a.parts[2] // math.gcd(L, a.parts[2])
    lead = poly[-1] * L
    approx = np.roots([complex(a) for a in reversed(poly)])
    found: list[QQi] = []
    for r in approx:
        w = complex(lead) * r
        cand = QQi(round(w.real), round(w.imag)) / lead
        if cand not in found and _poly_eval(poly, cand) == 0:
            found.append(cand)
    return found if len(found) == degree else None


def float_roots(poly: Sequence[complex], min_sep: float = 1e-6) -> list[complex] | None:
    roots = [complex(r) for r in np.roots([complex(a) for a in reversed(poly)])]
    for i in range(len(roots)):
        for j in range(i):
            if abs(roots[i] - roots[j]) < min_sep:
                return None
    return roots


def lagrange_idempotents(c: CMatrix, unit: CMatrix, roots: Sequence) -> list[CMatrix]:
    """Spectral projections ``prod_{j != i} (c - r_j)/(r_i - r_j)``."""
    out = []
    for i, ri in enumerate(roots):
        e = unit
        for j, rj in enumerate(roots):
            if j != i:
                e = (e @ (c - unit.scale(rj))).scale(1 / (ri - rj))
        out.append(e)
    return out


class Block(NamedTuple):
    block_dim: int
    is_full_matrix_algebra: bool
    matrix_size: int | None


@dataclass
class StructureReport:
    dimension: int
    center_dim: int
    radical_dim: int
    blocks: list[Block]
    backend: str
    residual: float = 0.0
    idempotents: list[CMatrix] = field(default_factory=list, repr=False)
    downgraded: bool = False
    attempts: int = 1

    @property
    def profile(self) -> str:
        if not self.blocks:
            return "0"
        parts = []
        for b in self.blocks:
            parts.append(f"Mat{b.matrix_size}" if b.is_full_matrix_algebra else f"B{b.block_dim}")
        return "+".join(parts)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "center_dim": self.center_dim,
            "radical_dim": self.radical_dim,
            "blocks": [list(b) for b in self.blocks],
            "profile": self.profile,
            "residual": self.residual,
            "backend": self.backend,
            "downgraded": self.downgraded,
        }


def _random_coeffs(rng: random.Random, k: int) -> list[Fraction]:
    while True:
        coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(k)]
        if any(coeffs):
            return coeffs


def central_idempotents(alg: MatrixAlgebra, seed: int = 0, max_retries: int = 12,
                        tol: float | None = None):
    """Primitive central idempotents of a semisimple algebra.

    Returns ``(idempotents, attempts, backend_used)``.  On the exact backend,
    if the minimal polynomial of the random element does not split over Q(i),
    the computation is redone in floating point.
    """
    tol = alg.tol if tol is None else tol
    Z = center(alg, tol)
    unit = algebra_unit(alg)
    rng = random.Random(seed)
    k = Z.dim
    if k == 1:
        return [unit], 1, alg.backend
    for attempt in range(1, max_retries + 1):
        coeffs = [to_backend(q, alg.backend) for q in _random_coeffs(rng, k)]
        c = Z.combine(coeffs)
        if alg.backend == FLOAT:
            c = c / c.max_abs()
        poly = minimal_polynomial(c, unit, tol)
        if len(poly) - 1 < k:
            continue
        if alg.backend == EXACT:
            roots = exact_roots(poly)
            if roots is None:
                fl = MatrixAlgebra.from_basis([b.to_backend(FLOAT) for b in alg.basis], tol)
                idem, n_try, _ = central_idempotents(fl, seed, max_retries, tol)
                return idem, attempt + n_try, FLOAT
        else:
            roots = float_roots(poly)
            if roots is None:
                continue
        return lagrange_idempotents(c, unit, roots), attempt, alg.backend
    raise DecompositionError(f"degenerate random element after {max_retries} attempts")


def _idempotent_residual(alg: MatrixAlgebra, idem: Sequence[CMatrix], unit: CMatrix) -> float:
    worst = 0.0
    total = CMatrix.zeros(alg.ambient_dim, backend=idem[0].backend)
    basis = [b.to_backend(idem[0].backend) for b in alg.basis]
    for i, e in enumerate(idem):
        total = total + e
        worst = max(worst, residual(e @ e - e))
        for b in basis:
            worst = max(worst, residual(e @ b - b @ e))
        for j, f in enumerate(idem):
            if j != i:
                worst = max(worst, residual(e @ f))
    worst = max(worst, residual(total - unit.to_backend(total.backend)))
    return worst


def block_decompose(alg: MatrixAlgebra, tol: float | None = None, seed: int = 0,
                    max_retries: int = 12) -> StructureReport:
    """Block structure of ``alg`` (of ``alg / rad`` when the radical is nonzero)."""
    tol = alg.tol if tol is None else tol
    rad = radical(alg, tol)
    cdim = center(alg, tol).dim
    if rad.dim:
        if rad.dim == alg.dimension:
            return StructureReport(alg.dimension, cdim, rad.dim, [], alg.backend)
        inner = block_decompose(quotient_algebra(alg, rad), tol, seed, max_retries)
        inner.dimension = alg.dimension
        inner.center_dim = cdim
        inner.radical_dim = rad.dim
        return inner
    idem, attempts, backend = central_idempotents(alg, seed, max_retries, tol)
    work = alg if backend == alg.backend else MatrixAlgebra.from_basis(
        [b.to_backend(backend) for b in alg.basis], tol)
    Zw = center(work, tol)
    blocks = []
    for e in idem:
        bdim = span_basis([b @ e for b in work.basis], tol).dim
        zdim = span_basis([z @ e for z in Zw.basis], tol).dim
        size = math.isqrt(bdim)
        full = zdim == 1 and size * size == bdim
        blocks.append(Block(bdim, full, size if full else None))
    order = sorted(range(len(blocks)), key=lambda i: -blocks[i].block_dim)
    blocks = [blocks[i] for i in order]
    idem = [idem[i] for i in order]
    res = _idempotent_residual(work, idem, algebra_unit(work))
    return StructureReport(
        dimension=alg.dimension,
        center_dim=cdim,
        radical_dim=0,
        blocks=blocks,
        backend=backend,
        residual=res,
        idempotents=idem,
        downgraded=backend != alg.backend,
        attempts=attempts,
    )
