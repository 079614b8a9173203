"""Characters of P = <g, z>, induced 2-dim representations of G, and the
decomposition of the 4-dim representation x -> X, y -> Y, z -> Z.

Invariant subspaces are found from the spectral projections of a random
element of the commutant, which splits cleanly for every theta (the
g-spectrum alone is degenerate across blocks at theta = +-i).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import DecompositionError, exact_roots, float_roots, lagrange_idempotents, minimal_polynomial
from .graph import build_generators
from .linalg import CMatrix, Subspace, column_space, hstack, inverse, nullspace, residual, span_basis
from .scalars import DEFAULT_TOL, EXACT, FLOAT, QQi, Theta, format_scalar, is_zero, one, sqrt, to_backend, zero


def commutant(mats: Sequence[CMatrix], tol: float = DEFAULT_TOL) -> Subspace:
    """All ``M`` with ``M A = A M`` for every ``A`` in ``mats``."""
    mats = list(mats)
    n = mats[0].dim
    backend = mats[0].backend
    return intertwiners(mats, mats, tol) if mats else Subspace(
        [CMatrix.unit(i, j, n, backend=backend) for i in range(n) for j in range(n)])


def intertwiners(src: Sequence[CMatrix], dst: Sequence[CMatrix], tol: float = DEFAULT_TOL) -> Subspace:
    """All ``T`` (dst_dim x src_dim) with ``T A_k = B_k T`` for paired ``A_k, B_k``."""
    src, dst = list(src), list(dst)
    n, m = src[0].dim, dst[0].dim
    backend = src[0].backend
    z = zero(backend)
    rows = []
    # unknown T[r][s] lives at column r*n + s
    for A, B in zip(src, dst):
        for p in range(m):
            for q in range(n):
                row = [z] * (m * n)
                for s in range(n):
                    row[p * n + s] = row[p * n + s] + A[s, q]
                for r in range(m):
                    row[r * n + q] = row[r * n + q] - B[p, r]
                rows.append(row)
    vecs = nullspace(rows, m * n, backend, tol)
    return span_basis([CMatrix.from_flat(v, (m, n), backend) for v in vecs], tol, (m, n), backend)


@dataclass(frozen=True)
class Character:
    """Character of the abelian subgroup P: values on g and on z."""

    chi_g: object
    chi_z: object

    def __post_init__(self):
        if is_zero(self.chi_g, 0.0):
            raise ValueError("chi(g) must be nonzero")
        if not (is_zero(self.chi_z - 1, 1e-9) or is_zero(self.chi_z + 1, 1e-9)):
            raise ValueError("chi(z) must be +1 or -1")

    @property
    def backend(self) -> str:
        return EXACT if isinstance(self.chi_g, QQi) or isinstance(self.chi_z, QQi) else FLOAT

    def to_dict(self) -> dict:
        return {"chi_g": format_scalar(self.chi_g), "chi_z": format_scalar(self.chi_z)}


@dataclass(frozen=True)
class InducedRep:
    R_x: CMatrix
    R_y: CMatrix
    R_z: CMatrix
    R_g: CMatrix

    def as_list(self) -> list[CMatrix]:
        return [self.R_x, self.R_y, self.R_z]

    def relation_residual(self) -> float:
        I = CMatrix.identity(self.R_x.dim, self.R_x.backend)
        x, y, zz, g = self.R_x, self.R_y, self.R_z, self.R_g
        return max(
            residual(x @ x - I), residual(y @ y - I), residual(zz @ zz - I),
            residual(x @ zz - zz @ x), residual(y @ zz - zz @ y),
            residual(g - x @ y), residual(x @ g @ x @ g - I),
        )


def induce(chi: Character, backend: str | None = None) -> InducedRep:
    """V_chi on the basis {v, x.v}: g -> diag(chi(g), 1/chi(g)), x -> swap."""
    backend = backend or chi.backend
    cg = to_backend(chi.chi_g, backend)
    cz = to_backend(chi.chi_z, backend)
    o, z = one(backend), zero(backend)
    R_g = CMatrix._trusted([[cg, z], [z, 1 / cg]], backend)
    R_x = CMatrix._trusted([[z, o], [o, z]], backend)
    R_z = CMatrix.identity(2, backend).scale(cz)
    return InducedRep(R_x, R_x @ R_g, R_z, R_g)


def is_irreducible(rep: InducedRep, tol: float = DEFAULT_TOL) -> bool:
    """Schur test: the commutant of the image is one-dimensional."""
    return commutant(rep.as_list(), tol).dim == 1


def canonical_value(mu, tol: float = DEFAULT_TOL):
    """Representative of {mu, 1/mu}: larger modulus, ties broken by (re, im)."""
    inv = 1 / mu
    if isinstance(mu, QQi):
        a, b = mu.abs2(), inv.abs2()
        if a != b:
            return mu if a > b else inv
        key = lambda s: (s.real, s.imag)
    else:
        a, b = abs(mu), abs(inv)
        if abs(a - b) > tol:
            return mu if a > b else inv
        key = lambda s: (round(s.real / tol), round(s.imag / tol))
    return mu if key(mu) >= key(inv) else inv


def _eigenvalues_2x2(m: CMatrix):
    tr = m.trace()
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    root = sqrt(tr * tr - 4 * det, m.backend)
    if root is None:
        return None
    return (tr + root) / 2, (tr - root) / 2


@dataclass
class RepBlock:
    dim: int
    character: Character
    matrices: dict[str, CMatrix] = field(repr=False)
    irreducible: bool = True

    def to_dict(self) -> dict:
        out = {"dim": self.dim, "irreducible": self.irreducible, **self.character.to_dict()}
        if self.dim == 1:
            out["x"] = format_scalar(self.matrices["x"][0, 0])
        return out


@dataclass
class DecompositionReport:
    theta: Theta
    blocks: list[RepBlock]
    change_of_basis: CMatrix
    residual: float
    backend: str
    downgraded: bool = False
    attempts: int = 1
    commutant_dim: int = 0

    @property
    def characters(self) -> list[Character]:
        return [b.character for b in self.blocks]

    def block_intertwiner_dims(self, tol: float = DEFAULT_TOL) -> dict[tuple[int, int], int]:
        """Dimension of the intertwiner space between every pair of blocks."""
        out = {}
        for i, a in enumerate(self.blocks):
            for j, b in enumerate(self.blocks):
                if i < j:
                    keys = ("x", "y", "z")
                    out[(i, j)] = intertwiners([a.matrices[k] for k in keys],
                                               [b.matrices[k] for k in keys], tol).dim
        return out

    def klein_residual(self) -> float:
        """Max over 1-dim blocks of |xy - yx| and |xy - (lam/2) z|."""
        lam2 = self.theta.lam / 2
        worst = 0.0
        for b in self.blocks:
            if b.dim != 1:
                continue
            x, y, z = (b.matrices[k][0, 0] for k in "xyz")
            worst = max(worst, float(abs(x * y - y * x)), float(abs(x * y - lam2 * z)))
        return worst

    def to_dict(self) -> dict:
        return {
            "blocks": [b.to_dict() for b in self.blocks],
            "residual": self.residual,
            "backend": self.backend,
            "downgraded": self.downgraded,
            "commutant_dim": self.commutant_dim,
        }


def _conjugate(S: CMatrix, Sinv: CMatrix, mats: dict[str, CMatrix]) -> dict[str, CMatrix]:
    return {k: Sinv @ m @ S for k, m in mats.items()}


def _sub(m: CMatrix, lo: int, hi: int) -> CMatrix:
    return CMatrix._trusted([r[lo:hi] for r in m.rows[lo:hi]], m.backend)


def _off_block(m: CMatrix, bounds: Sequence[tuple[int, int]]) -> float:
    owner = {}
    for b, (lo, hi) in enumerate(bounds):
        for i in range(lo, hi):
            owner[i] = b
    worst = 0.0
    for i in range(m.nrows):
        for j in range(m.ncols):
            if owner[i] != owner[j]:
                worst = max(worst, float(abs(m[i, j])))
    return worst


def _split(theta: Theta, tol: float, seed: int, max_retries: int):
    gens = build_generators(theta)
    mats = {"x": gens.X, "y": gens.Y, "z": gens.Z, "g": gens.G}
    C = commutant(gens.as_list(), tol)
    for a in C.basis:
        for b in C.basis:
            if not (a @ b - b @ a).is_zero(tol):
                raise DecompositionError("commutant is not commutative: representation has multiplicities")
    backend = theta.backend
    I = CMatrix.identity(4, backend)
    rng = random.Random(seed)
    for attempt in range(1, max_retries + 1):
        coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(C.dim)]
        if not any(coeffs):
            continue
        c = C.combine([to_backend(q, backend) for q in coeffs])
        if backend == FLOAT:
            c = c / c.max_abs()
        poly = minimal_polynomial(c, I, tol)
        if len(poly) - 1 < C.dim:
            continue
        roots = exact_roots(poly) if backend == EXACT else float_roots(poly)
        if roots is None:
            if backend == EXACT:
                return None
            continue
        return mats, C, lagrange_idempotents(c, I, roots), attempt
    raise DecompositionError(f"degenerate random element after {max_retries} attempts")


def decompose_phi(theta: Theta, tol: float = DEFAULT_TOL, seed: int = 0,
                  max_retries: int = 12) -> DecompositionReport:
    """Split the representation x -> X, y -> Y, z -> Z into irreducible blocks.

    Two-dimensional blocks are re-based to ``{v, X v}`` with ``v`` an eigenvector
    of ``g = XY`` for the canonical character value, so each such block equals
    ``induce(chi)`` exactly (exact backend) or to rounding (float backend).
    """
    split = _split(theta, tol, seed, max_retries)
    downgraded = False
    if split is None:
        theta = Theta.from_value(complex(theta.value), FLOAT, tol)
        split = _split(theta, tol, seed, max_retries)
        downgraded = True
    mats, C, projections, attempts = split
    backend = theta.backend

    columns = [column_space(P, tol) for P in projections]
    # 2-dim blocks first, ordered by the z-eigenvalue
    S = CMatrix._trusted(list(zip(*[c for cols in columns for c in cols])), backend)
    conj = _conjugate(S, inverse(S, tol), mats)
    bounds, lo = [], 0
    for cols in columns:
        bounds.append((lo, lo + len(cols)))
        lo += len(cols)

    new_cols = []
    infos = []
    for (lo, hi), cols in zip(bounds, columns):
        d = hi - lo
        Rz = _sub(conj["z"], lo, hi)
        chi_z = Rz[0, 0]
        basis = CMatrix._trusted(list(zip(*cols)), backend)
        if d == 2:
            Rg = _sub(conj["g"], lo, hi)
            Rx = _sub(conj["x"], lo, hi)
            eig = _eigenvalues_2x2(Rg)
            if eig is None:
                raise DecompositionError("block eigenvalues leave Q(i)")
            mu = canonical_value(eig[0], tol)
            shifted = Rg - CMatrix.identity(2, backend).scale(mu)
            vs = nullspace(shifted.rows, 2, backend, tol)
            v = CMatrix._trusted([[s] for s in vs[0]], backend)
            w = Rx @ v
            local = hstack([v, w])
            if is_zero(local[0, 0] * local[1, 1] - local[0, 1] * local[1, 0], tol):
                new = basis
                irreducible = False
            else:
                new = basis @ local
                irreducible = True
            new_cols.append([list(c) for c in zip(*new.rows)])
            infos.append((d, mu, chi_z, irreducible))
        else:
            new_cols.append(cols)
            infos.append((d, _sub(conj["g"], lo, hi)[0, 0] if d == 1 else None, chi_z, d == 1))

    order = sorted(range(len(infos)), key=lambda i: (-infos[i][0], -complex(infos[i][2]).real,
                                                     -complex(infos[i][1]).real if infos[i][1] is not None else 0,
                                                     -complex(infos[i][1]).imag if infos[i][1] is not None else 0))
    new_cols = [new_cols[i] for i in order]
    infos = [infos[i] for i in order]
    S = CMatrix._trusted(list(zip(*[c for cols in new_cols for c in cols])), backend)
    conj = _conjugate(S, inverse(S, tol), mats)
    bounds, lo = [], 0
    for cols in new_cols:
        bounds.append((lo, lo + len(cols)))
        lo += len(cols)

    res = max(_off_block(m, bounds) for m in conj.values())
    blocks = []
    for (lo, hi), (d, mu, chi_z, irreducible) in zip(bounds, infos):
        local = {k: _sub(m, lo, hi) for k, m in conj.items()}
        res = max(res, residual(local["z"] - CMatrix.identity(d, backend).scale(chi_z)))
        if d == 2 and irreducible:
            chi = Character(mu, chi_z)
            ind = induce(chi, backend)
            res = max(res, residual(local["x"] - ind.R_x), residual(local["y"] - ind.R_y),
                      residual(local["g"] - ind.R_g))
        elif d == 1:
            chi = Character(local["g"][0, 0], chi_z)
        else:
            chi = Character(mu if mu is not None else one(backend), chi_z)
        blocks.append(RepBlock(d, chi, local, irreducible if d != 2 else
                               irreducible and commutant([local[k] for k in "xyz"], tol).dim == 1))
    return DecompositionReport(theta, blocks, S, res, backend, downgraded, attempts, C.dim)
