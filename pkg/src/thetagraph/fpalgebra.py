"""The deformation algebra A_theta by normal-form rewriting.

A_theta is generated by x, y, z subject to

    x^2 = y^2 = z^2 = 1,  xz = zx,  yz = zy,  xy + yx = lam * z,

with ``lam = theta + 1/theta`` and ``g = xy``.  Since ``yx = g^{-1}`` the last
relation reads ``g + g^{-1} = lam z``.

For ``lam != 0`` this gives ``z = ((lam^2-1) g - g^3)/lam`` and
``g^4 = (lam^2-2) g^2 - 1``, so every word rewrites to the basis
``1, g, g^2, g^3, x, xg, xg^2, xg^3`` (``gx = x g^{-1}`` moves x to the front).
For ``lam = 0`` (theta = +-i) z is independent, ``g^2 = -1``, ``gx = -xg``, and
the basis is ``1, g, x, z, xg, xz, gz, xgz``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .algebra import MatrixAlgebra, associativity_defect, generate_algebra, radical, regular_matrices
from .checks import Check
from .graph import build_generators
from .linalg import CMatrix, Subspace, column, residual, solve_homogeneous, span_basis, subspace_equal
from .scalars import DEFAULT_TOL, EXACT, Theta, is_zero, one, to_backend, zero

GENERIC = "generic"
KLEIN = "klein"
CLIFFORD = "clifford"

SYMBOLS = ("x", "y", "z", "g")

Word = tuple


class RewriteError(RuntimeError):
    pass


class FPPresentation:
    """A_theta for one fixed theta: rule set, basis and multiplication table."""

    def __init__(self, theta: Theta, tol: float = DEFAULT_TOL):
        self.theta = theta
        self.backend = theta.backend
        self.tol = tol
        self.lam = theta.lam
        if is_zero(self.lam, tol):
            self.regime = CLIFFORD
        elif is_zero(self.lam - 2, tol) or is_zero(self.lam + 2, tol):
            self.regime = KLEIN
        else:
            self.regime = GENERIC
        o = one(self.backend)
        if self.regime == CLIFFORD:
            self.basis_words: tuple[Word, ...] = (
                (), ("g",), ("x",), ("z",), ("x", "g"), ("x", "z"), ("g", "z"), ("x", "g", "z"),
            )
            self.rules = [
                (("y",), {("x", "g"): o}),
                (("x", "x"), {(): o}),
                (("z", "z"), {(): o}),
                (("g", "x"), {("x", "g"): -o}),
                (("g", "g"), {(): -o}),
                (("z", "x"), {("x", "z"): o}),
                (("z", "g"), {("g", "z"): o}),
            ]
        else:
            lam = self.lam
            l2 = lam * lam
            self.basis_words = (
                (), ("g",), ("g", "g"), ("g", "g", "g"),
                ("x",), ("x", "g"), ("x", "g", "g"), ("x", "g", "g", "g"),
            )
            self.rules = [
                (("y",), {("x", "g"): o}),
                (("z",), {("g",): (l2 - 1) / lam, ("g", "g", "g"): -o / lam}),
                (("x", "x"), {(): o}),
                (("g", "x"), {("x", "g"): l2 - 2, ("x", "g", "g", "g"): -o}),
                (("g", "g", "g", "g"), {("g", "g"): l2 - 2, (): -o}),
            ]
        self._index = {w: i for i, w in enumerate(self.basis_words)}

    @property
    def dim(self) -> int:
        return len(self.basis_words)

    @property
    def basis_labels(self) -> list[str]:
        return [word_label(w) for w in self.basis_words]

    def __repr__(self) -> str:
        return f"FPPresentation(theta={self.theta}, regime={self.regime})"

    # rewriting
    def _redex(self, word: Word, from_right: bool):
        positions = range(len(word) - 1, -1, -1) if from_right else range(len(word))
        for pos in positions:
            for lhs, rhs in self.rules:
                if word[pos:pos + len(lhs)] == lhs:
                    return pos, lhs, rhs
        return None

    def reduce(self, comb: dict, strategy: str = "left", max_steps: int = 100_000) -> dict:
        """Rewrite a linear combination of words until every word is irreducible."""
        from_right = strategy == "right"
        pending: dict[Word, object] = defaultdict(lambda: zero(self.backend))
        for w, c in comb.items():
            pending[tuple(w)] = pending[tuple(w)] + to_backend(c, self.backend)
        done: dict[Word, object] = defaultdict(lambda: zero(self.backend))
        steps = 0
        while pending:
            w, c = pending.popitem()
            if is_zero(c, 0.0):
                continue
            hit = self._redex(w, from_right)
            if hit is None:
                done[w] = done[w] + c
                continue
            steps += 1
            if steps > max_steps:
                raise RewriteError("rewriting did not terminate")
            pos, lhs, rhs = hit
            for rw, rc in rhs.items():
                nw = w[:pos] + rw + w[pos + len(lhs):]
                pending[nw] = pending[nw] + c * rc
        return {w: c for w, c in done.items() if not is_zero(c, 0.0)}

    def vector(self, comb: dict) -> tuple:
        z = zero(self.backend)
        out = [z] * self.dim
        for w, c in comb.items():
            if w not in self._index:
                raise RewriteError(f"irreducible word {word_label(w)!r} outside the basis")
            out[self._index[w]] = out[self._index[w]] + c
        return tuple(out)

    def normal_form(self, word: Iterable[str], strategy: str = "left") -> FPElement:
        w = tuple(word)
        bad = [s for s in w if s not in SYMBOLS]
        if bad:
            raise ValueError(f"unknown symbol {bad[0]!r}")
        # Feed symbols one at a time into an already reduced combination
        # ("left": append, innermost redex leftmost; "right": prepend).  Reducing
        # the whole word at once is exponential once z expands into g-cubics.
        comb: dict = {(): one(self.backend)}
        if strategy == "right":
            for s in reversed(w):
                comb = self.reduce({(s,) + u: c for u, c in comb.items()}, "right")
        else:
            for s in w:
                comb = self.reduce({u + (s,): c for u, c in comb.items()}, "left")
        return FPElement(self, self.vector(comb))

    @cached_property
    def table(self) -> list[list[tuple]]:
        """``table[i][j]``: coefficient vector of ``basis_i * basis_j``."""
        return [[self.normal_form(a + b).coeffs for b in self.basis_words] for a in self.basis_words]

    def element(self, coeffs: Sequence) -> FPElement:
        return FPElement(self, tuple(to_backend(c, self.backend) for c in coeffs))

    def basis_element(self, i: int) -> FPElement:
        z, o = zero(self.backend), one(self.backend)
        return FPElement(self, tuple(o if j == i else z for j in range(self.dim)))

    @property
    def unit(self) -> FPElement:
        return self.basis_element(0)

    def gen(self, symbol: str) -> FPElement:
        return self.normal_form((symbol,))

    def critical_pairs(self) -> list[tuple[Word, dict, dict]]:
        """Overlap ambiguities whose two one-step rewrites reduce differently."""
        bad = []
        for (l1, r1), (l2, r2) in itertools.product(self.rules, repeat=2):
            overlaps = []
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    overlaps.append((l1 + l2[k:], 0, len(l1) - k))
            if len(l2) < len(l1) and (l1, r1) != (l2, r2):
                for p in range(len(l1) - len(l2) + 1):
                    if l1[p:p + len(l2)] == l2:
                        overlaps.append((l1, 0, p))
            for word, p1, p2 in overlaps:
                a = {word[:p1] + rw + word[p1 + len(l1):]: c for rw, c in r1.items()}
                b = {word[:p2] + rw + word[p2 + len(l2):]: c for rw, c in r2.items()}
                na, nb = self.vector(self.reduce(a)), self.vector(self.reduce(b))
                if any(not is_zero(u - v, self.tol) for u, v in zip(na, nb)):
                    bad.append((word, dict(zip(self.basis_labels, na)), dict(zip(self.basis_labels, nb))))
        return bad


def word_label(word: Word) -> str:
    if not word:
        return "1"
    out = []
    for sym, grp in itertools.groupby(word):
        n = len(list(grp))
        out.append(sym if n == 1 else f"{sym}^{n}")
    return "".join(out)


@dataclass(frozen=True)
class FPElement:
    """Element of A_theta stored as its normal-form coefficient vector."""

    pres: FPPresentation
    coeffs: tuple

    def _same(self, other: FPElement):
        if not isinstance(other, FPElement):
            raise TypeError("expected FPElement")
        if other.pres is not self.pres:
            if other.pres.regime != self.pres.regime or other.pres.theta != self.pres.theta:
                raise ValueError("elements belong to different presentations")

    def __add__(self, other):
        if not isinstance(other, FPElement):
            return self + self.pres.unit.scale(other)
        self._same(other)
        return FPElement(self.pres, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FPElement(self.pres, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> FPElement:
        s = to_backend(s, self.pres.backend)
        return FPElement(self.pres, tuple(s * a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, FPElement):
            return fp_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int) -> FPElement:
        out = self.pres.unit
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, FPElement):
            return NotImplemented
        return self.pres.regime == other.pres.regime and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(is_zero(c, tol) for c in self.coeffs)

    def __str__(self) -> str:
        from .scalars import format_scalar

        terms = []
        for c, label in zip(self.coeffs, self.pres.basis_labels):
            if is_zero(c, 0.0):
                continue
            txt = format_scalar(c)
            if label == "1":
                terms.append(txt if not (" " in txt or "+" in txt[1:] or "-" in txt[1:]) else f"({txt})")
            elif txt == "1":
                terms.append(label)
            elif txt == "-1":
                terms.append(f"-{label}")
            elif "+" in txt[1:] or "-" in txt[1:]:
                terms.append(f"({txt})*{label}")
            else:
                terms.append(f"{txt}*{label}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return out


def fp_normal_form(word: Iterable[str], pres: FPPresentation, strategy: str = "left") -> FPElement:
    """Normal form of a word over ``x, y, z, g``."""
    return pres.normal_form(word, strategy)


def fp_multiply(u: FPElement, v: FPElement, pres: FPPresentation | None = None) -> FPElement:
    pres = pres or u.pres
    u._same(v)
    if pres.regime != u.pres.regime:
        raise ValueError("regime mismatch")
    z = zero(pres.backend)
    out = [z] * pres.dim
    table = pres.table
    for i, a in enumerate(u.coeffs):
        if is_zero(a, 0.0):
            continue
        for j, b in enumerate(v.coeffs):
            if is_zero(b, 0.0):
                continue
            ab = a * b
            for k, c in enumerate(table[i][j]):
                if c:
                    out[k] = out[k] + ab * c
    return FPElement(pres, tuple(out))


# ---------------------------------------------------------------------------
# the morphism psi: A_theta -> M_theta

def symbol_matrices(theta: Theta) -> dict[str, CMatrix]:
    gens = build_generators(theta)
    return {"x": gens.X, "y": gens.Y, "z": gens.Z, "g": gens.X @ gens.Y}


def word_matrix(word: Iterable[str], theta: Theta) -> CMatrix:
    mats = symbol_matrices(theta)
    out = CMatrix.identity(4, theta.backend)
    for s in word:
        out = out @ mats[s]
    return out


def _basis_images(pres: FPPresentation) -> list[CMatrix]:
    cache = pres.__dict__.setdefault("_psi_images", None)
    if cache is None:
        cache = [word_matrix(w, pres.theta) for w in pres.basis_words]
        pres.__dict__["_psi_images"] = cache
    return cache


def psi(u: FPElement, theta: Theta | None = None) -> CMatrix:
    """Image of ``u`` under x -> X, y -> Y, z -> Z."""
    pres = u.pres
    if theta is not None and theta != pres.theta:
        raise ValueError("theta does not match the presentation")
    out = CMatrix.zeros(4, backend=pres.backend)
    for c, img in zip(u.coeffs, _basis_images(pres)):
        if not is_zero(c, 0.0):
            out = out + img.scale(c)
    return out


def psi_matrix(pres: FPPresentation) -> CMatrix:
    """16 x 8 matrix of psi on the normal-form basis (columns = basis images)."""
    imgs = [m.flat() for m in _basis_images(pres)]
    return CMatrix._trusted([[img[r] for img in imgs] for r in range(16)], pres.backend)


def kernel_of_psi(pres: FPPresentation, tol: float | None = None) -> Subspace:
    """Ker psi inside the 8-dim coefficient space (8 x 1 column vectors)."""
    return solve_homogeneous(psi_matrix(pres), pres.tol if tol is None else tol)


def coeff_column(u: FPElement) -> CMatrix:
    return column(u.coeffs, u.pres.backend)


def elements_of(space: Subspace, pres: FPPresentation) -> list[FPElement]:
    return [FPElement(pres, tuple(r[0] for r in b.rows)) for b in space.basis]


def regular_algebra(pres: FPPresentation) -> MatrixAlgebra:
    """A_theta as the algebra of its left multiplication operators."""
    sc = pres.table
    return MatrixAlgebra.from_basis(regular_matrices(sc, pres.backend), pres.tol)


def j_basis(pres: FPPresentation) -> list[FPElement]:
    """``g^2 - 1, x(g^2 - 1), g(g^2 - 1), xg(g^2 - 1)``."""
    nf = pres.normal_form
    t = nf("gg") - pres.unit
    return [t, nf("x") * t, nf("g") * t, nf("xg") * t]


# ---------------------------------------------------------------------------
# structure of A_theta and the kernel of psi

@dataclass
class KernelReport:
    theta: Theta
    regime: str
    klein_branch: bool
    checks: list[Check]
    kernel_dim: int
    algebra_dim: int
    image_dim: int

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "klein_branch": self.klein_branch,
            "dim_A": self.algebra_dim,
            "dim_ker_psi": self.kernel_dim,
            "dim_image": self.image_dim,
            "checks": [c.to_dict() for c in self.checks],
        }


def _coeff_space(elems: Sequence[FPElement], pres: FPPresentation, tol: float) -> Subspace:
    return span_basis([coeff_column(e) for e in elems], tol, (pres.dim, 1), pres.backend)


def verify_theorem2(theta: Theta, tol: float = DEFAULT_TOL) -> KernelReport:
    pres = FPPresentation(theta, tol)
    be = pres.backend
    checks: list[Check] = []

    def add(name, passed, res=None, expected=None, observed=None):
        checks.append(Check(name, bool(passed), res, expected, observed, be))

    nf = pres.normal_form
    o = pres.unit
    lam = pres.lam
    rels = {
        "x^2=1": nf("xx") - o,
        "y^2=1": nf("yy") - o,
        "z^2=1": nf("zz") - o,
        "xz=zx": nf("xz") - nf("zx"),
        "yz=zy": nf("yz") - nf("zy"),
        "xy+yx=lam*z": nf("xy") + nf("yx") - nf("z").scale(lam),
    }
    worst = max(max(abs(c) for c in e.coeffs) for e in rels.values())
    add("relations hold in A_theta", all(e.is_zero(tol) for e in rels.values()), float(worst))

    reg = regular_algebra(pres)
    add("dim A_theta = 8 (normal forms independent, closed)", reg.dimension == 8 and pres.dim == 8,
        expected=8, observed=reg.dimension)
    assoc = associativity_defect(reg)
    add("multiplication table associative", assoc <= tol, assoc)

    imgs = _basis_images(pres)
    hom = 0.0
    for i, bi in enumerate(pres.basis_words):
        for j, bj in enumerate(pres.basis_words):
            prod = FPElement(pres, pres.table[i][j])
            hom = max(hom, residual(psi(prod) - imgs[i] @ imgs[j]))
    add("psi is multiplicative on basis pairs", hom <= tol, hom)

    gens = build_generators(theta)
    m_theta = generate_algebra(gens.as_list(), True, tol)
    image = span_basis(imgs, tol)
    add("psi is surjective onto M_theta", subspace_equal(image, m_theta.space, tol),
        expected=m_theta.dimension, observed=image.dim)

    ker = kernel_of_psi(pres, tol)
    klein = theta.is_plus_minus_one(tol)
    if not klein:
        add("Ker psi = 0", ker.dim == 0, expected=0, observed=ker.dim)
        add("psi bijective (dim M_theta = 8)", image.dim == 8 == m_theta.dimension,
            expected=8, observed=m_theta.dimension)
    else:
        t = nf("gg") - o
        sq = t * t
        add("(g^2-1)^2 = 0", sq.is_zero(tol), float(max(abs(c) for c in sq.coeffs)))
        J = j_basis(pres)
        jspace = _coeff_space(J, pres, tol)
        add("J basis independent (dim J = 4)", jspace.dim == 4, expected=4, observed=jspace.dim)
        ideal_ok = all(
            jspace.contains(coeff_column(s * e)) and jspace.contains(coeff_column(e * s))
            for e in J for s in (nf("x"), nf("y"), nf("z"), nf("g"))
        )
        add("J is a two-sided ideal", ideal_ok)
        jj = max(max(abs(c) for c in (a * b).coeffs) for a in J for b in J)
        add("J^2 = 0", all((a * b).is_zero(tol) for a in J for b in J), float(jj))
        pj = max(residual(psi(e)) for e in J)
        add("psi(J) = 0", all(psi(e).is_zero(tol) for e in J), pj)
        add("Ker psi = J", subspace_equal(ker, jspace, tol), expected=4, observed=ker.dim)
        add("A/J = M_theta (dim 4, induced map bijective)",
            pres.dim - jspace.dim == m_theta.dimension == image.dim == 4,
            expected=4, observed=m_theta.dimension)
        rad = radical(reg, tol)
        rad_space = span_basis([column([r[0] for r in m.rows], be) for m in rad.basis], tol, (8, 1), be)
        add("trace-form radical of A_theta = J", subspace_equal(rad_space, jspace, tol),
            expected=4, observed=rad.dim)
    return KernelReport(theta, pres.regime, klein, checks, ker.dim, pres.dim, image.dim)


# ---------------------------------------------------------------------------
# the group G and its algebra CG

class GroupElement(NamedTuple):
    """``x^a g^k z^c`` with a, c in {0, 1} and k an integer."""

    a: int
    k: int
    c: int

    def __mul__(self, other: GroupElement) -> GroupElement:
        # g^k x = x g^-k
        k = -self.k if other.a else self.k
        return GroupElement((self.a + other.a) % 2, k + other.k, (self.c + other.c) % 2)

    def inverse(self) -> GroupElement:
        # (x^a g^k z^c)^-1 = z^c g^-k x^a = x^a g^{(-1)^{a+1} k} z^c
        return GroupElement(self.a, self.k if self.a else -self.k, self.c)

    def word(self) -> Word:
        w: list[str] = ["x"] * self.a
        if self.k >= 0:
            w += ["g"] * self.k
        else:
            w += ["y", "x"] * (-self.k)
        w += ["z"] * self.c
        return tuple(w)


GROUP_GENERATORS = {
    "x": GroupElement(1, 0, 0),
    "y": GroupElement(1, 1, 0),  # y = x g
    "z": GroupElement(0, 0, 1),
    "g": GroupElement(0, 1, 0),
}


class GroupAlgebraElement:
    """Finitely supported element of CG, G = <x, y, z | x^2=y^2=z^2=1, z central>."""

    def __init__(self, terms: dict[GroupElement, object], backend: str = EXACT):
        self.backend = backend
        self.terms = {g: to_backend(c, backend) for g, c in terms.items() if not is_zero(c, 0.0)}

    @classmethod
    def from_word(cls, word: Iterable[str], backend: str = EXACT) -> GroupAlgebraElement:
        g = GroupElement(0, 0, 0)
        for s in word:
            g = g * GROUP_GENERATORS[s]
        return cls({g: one(backend)}, backend)

    def __add__(self, other: GroupAlgebraElement) -> GroupAlgebraElement:
        out = dict(self.terms)
        for g, c in other.terms.items():
            out[g] = out.get(g, zero(self.backend)) + c
        return GroupAlgebraElement(out, self.backend)

    def __mul__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return GroupAlgebraElement({g: c * other for g, c in self.terms.items()}, self.backend)
        out: dict[GroupElement, object] = {}
        for g, c in self.terms.items():
            for h, d in other.terms.items():
                gh = g * h
                out[gh] = out.get(gh, zero(self.backend)) + c * d
        return GroupAlgebraElement(out, self.backend)

    def __eq__(self, other):
        return isinstance(other, GroupAlgebraElement) and self.terms == other.terms


def phi(u: GroupAlgebraElement, theta: Theta) -> CMatrix:
    """The representation x -> X, y -> Y, z -> Z of CG."""
    out = CMatrix.zeros(4, backend=theta.backend)
    for g, c in u.terms.items():
        out = out + word_matrix(g.word(), theta).scale(c)
    return out


def project_to_fp(u: GroupAlgebraElement, pres: FPPresentation) -> FPElement:
    """Quotient map CG -> A_theta."""
    out = pres.unit.scale(0)
    for g, c in u.terms.items():
        out = out + pres.normal_form(g.word()).scale(c)
    return out
