"""The parametric operator graph L(theta) and its generators X, Y, Z.

Rows and columns are numbered 1..4 in the docstrings (the usual matrix
convention) and stored 0-based.  A generic graph element is::

    [ a       b       c*t     d     ]
    [ b       a       d       c/t   ]
    [ c/t     d       a       b     ]
    [ d       c*t     b       a     ]

with ``t = theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .linalg import CMatrix, Subspace, residual, span_basis
from .scalars import DEFAULT_TOL, EXACT, BackendMismatch, Theta, backend_of, to_backend


def build_graph_element(a, b, c, d, theta: Theta) -> CMatrix:
    backend = theta.backend
    for s in (a, b, c, d):
        if backend_of(s) not in (None, backend):
            raise BackendMismatch("coefficient backend differs from theta backend")
    a, b, c, d = (to_backend(s, backend) for s in (a, b, c, d))
    t, ti = theta.value, theta.inverse
    rows = [
        [a, b, c * t, d],
        [b, a, d, c * ti],
        [c * ti, d, a, b],
        [d, c * t, b, a],
    ]
    return CMatrix._trusted(rows, backend)


@dataclass(frozen=True)
class GraphGenerators:
    X: CMatrix
    Y: CMatrix
    Z: CMatrix
    theta: Theta

    @property
    def identity(self) -> CMatrix:
        return CMatrix.identity(4, self.theta.backend)

    @property
    def G(self) -> CMatrix:
        """The product XY (image of g = xy)."""
        return self.X @ self.Y

    def as_list(self) -> list[CMatrix]:
        return [self.X, self.Y, self.Z]


def build_generators(theta: Theta) -> GraphGenerators:
    """X = (1 2)(3 4) permutation, Y = the c-component, Z = the d-component."""
    return GraphGenerators(
        X=build_graph_element(0, 1, 0, 0, theta),
        Y=build_graph_element(0, 0, 1, 0, theta),
        Z=build_graph_element(0, 0, 0, 1, theta),
        theta=theta,
    )


def graph_span(theta: Theta, tol: float = DEFAULT_TOL) -> Subspace:
    """span L(theta) = span{I, X, Y, Z}."""
    gens = build_generators(theta)
    return span_basis([gens.identity, *gens.as_list()], tol)


@dataclass
class RelationReport:
    backend: str
    residuals: dict[str, float] = field(default_factory=dict)
    exact_zero: dict[str, bool] = field(default_factory=dict)
    tol: float = DEFAULT_TOL

    @property
    def ok(self) -> bool:
        if self.backend == EXACT:
            return all(self.exact_zero.values())
        return all(r <= self.tol for r in self.residuals.values())

    def failures(self) -> list[str]:
        if self.backend == EXACT:
            return [k for k, v in self.exact_zero.items() if not v]
        return [k for k, v in self.residuals.items() if v > self.tol]


def check_relations(gens: GraphGenerators, tol: float = 1e-12) -> RelationReport:
    """Residuals of X^2=Y^2=Z^2=I, XZ=ZX, YZ=ZY and XY+YX=(t+1/t)Z.

    At theta = +-1 the Klein relations XY = YX = theta*Z are added.
    """
    X, Y, Z, I = gens.X, gens.Y, gens.Z, gens.identity
    theta = gens.theta
    diffs = {
        "X^2=I": X @ X - I,
        "Y^2=I": Y @ Y - I,
        "Z^2=I": Z @ Z - I,
        "XZ=ZX": X @ Z - Z @ X,
        "YZ=ZY": Y @ Z - Z @ Y,
        "XY+YX=(t+1/t)Z": X @ Y + Y @ X - Z.scale(theta.lam),
    }
    if theta.is_plus_minus_one(tol):
        sign = theta.value
        diffs["XY=YX"] = X @ Y - Y @ X
        diffs["XY=tZ"] = X @ Y - Z.scale(sign)
    rep = RelationReport(theta.backend, tol=tol)
    for name, d in diffs.items():
        rep.residuals[name] = residual(d)
        rep.exact_zero[name] = d.is_zero(0.0)
    return rep


def is_operator_system_span(space: Subspace, tol: float = DEFAULT_TOL) -> bool:
    """Span membership test: contains I and every adjointed basis element."""
    n = space.shape[0]
    if space.shape[0] != space.shape[1]:
        return False
    if not space.contains(CMatrix.identity(n, space.backend)):
        return False
    return all(space.contains(b.adjoint()) for b in space.basis)


def is_operator_system(theta: Theta, tol: float = DEFAULT_TOL) -> bool:
    """Whether span L(theta) is an operator system (true iff |theta| = 1)."""
    return is_operator_system_span(graph_span(theta, tol), tol)
