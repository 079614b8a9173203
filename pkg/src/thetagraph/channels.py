"""Quantum channels in Kraus form.

A channel ``rho -> sum_k V_k rho V_k^*`` is stored as its list of Kraus
operators (``dim_out x dim_in`` matrices); the environment dimension is the
number of operators.  Kraus matrices may be exact or float, the
Choi-based constructors are float only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .graph import is_operator_system_span
from .linalg import CMatrix, Subspace, kron, residual, span_basis
from .scalars import DEFAULT_TOL, FLOAT, BackendMismatch, zero


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class KrausChannel:
    kraus: tuple[CMatrix, ...]

    def __post_init__(self):
        ops = tuple(self.kraus)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        shape, backend = ops[0].shape, ops[0].backend
        for k in ops:
            if k.shape != shape:
                raise ChannelError("Kraus operators must share one shape")
            if k.backend != backend:
                raise BackendMismatch()
        object.__setattr__(self, "kraus", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].ncols

    @property
    def dim_out(self) -> int:
        return self.kraus[0].nrows

    @property
    def env_dim(self) -> int:
        return len(self.kraus)

    @property
    def backend(self) -> str:
        return self.kraus[0].backend

    def trace_preservation_residual(self) -> float:
        acc = CMatrix.zeros(self.dim_in, backend=self.backend)
        for v in self.kraus:
            acc = acc + v.adjoint() @ v
        return residual(acc - CMatrix.identity(self.dim_in, self.backend))

    def is_trace_preserving(self, tol: float = DEFAULT_TOL) -> bool:
        r = self.trace_preservation_residual()
        return r == 0 if self.backend != FLOAT else r <= tol

    def validate(self, tol: float = DEFAULT_TOL) -> KrausChannel:
        if not self.is_trace_preserving(tol):
            raise ChannelError(
                f"Kraus operators are not trace preserving (residual {self.trace_preservation_residual():.3e})"
            )
        return self


def _check_input(ch: KrausChannel, rho: CMatrix, dim: int, what: str):
    if rho.shape != (dim, dim):
        raise ChannelError(f"{what} must be {dim}x{dim}, got {rho.shape[0]}x{rho.shape[1]}")


def apply(ch: KrausChannel, rho: CMatrix) -> CMatrix:
    """``sum_k V_k rho V_k^*``."""
    _check_input(ch, rho, ch.dim_in, "input")
    out = CMatrix.zeros(ch.dim_out, backend=ch.backend)
    for v in ch.kraus:
        out = out + v @ rho @ v.adjoint()
    return out


def dual(ch: KrausChannel, x: CMatrix) -> CMatrix:
    """Heisenberg-picture map ``sum_k V_k^* x V_k``."""
    _check_input(ch, x, ch.dim_out, "observable")
    out = CMatrix.zeros(ch.dim_in, backend=ch.backend)
    for v in ch.kraus:
        out = out + v.adjoint() @ x @ v
    return out


def complementary(ch: KrausChannel, rho: CMatrix) -> CMatrix:
    """Environment output with entries ``Tr[V_j rho V_k^*]`` at (j, k)."""
    _check_input(ch, rho, ch.dim_in, "input")
    prods = [v @ rho for v in ch.kraus]
    rows = [[(pj @ vk.adjoint()).trace() for vk in ch.kraus] for pj in prods]
    return CMatrix._trusted(rows, ch.backend)


def complementary_channel(ch: KrausChannel) -> KrausChannel:
    """Kraus form of the complementary channel.

    ``W_b = sum_k |k><b| V_k``: row ``k`` of ``W_b`` is row ``b`` of ``V_k``.
    """
    ops = []
    for b in range(ch.dim_out):
        ops.append(CMatrix._trusted([v.rows[b] for v in ch.kraus], ch.backend))
    return KrausChannel(tuple(ops))


def stinespring_isometry(ch: KrausChannel) -> CMatrix:
    """``V = sum_k V_k (x) |k>`` mapping H_A into H_B (x) H_E."""
    out = None
    for k, v in enumerate(ch.kraus):
        ek = CMatrix.unit(k, 0, ch.env_dim, 1, ch.backend)
        term = kron(v, ek)
        out = term if out is None else out + term
    return out


def partial_trace(m: CMatrix, dims: tuple[int, int], keep: int) -> CMatrix:
    """Trace out one factor of a bipartite operator (``keep`` is 0 or 1)."""
    da, db = dims
    z = zero(m.backend)
    if keep == 0:
        rows = [[z] * da for _ in range(da)]
        for i in range(da):
            for j in range(da):
                acc = z
                for k in range(db):
                    acc = acc + m[i * db + k, j * db + k]
                rows[i][j] = acc
        return CMatrix._trusted(rows, m.backend)
    rows = [[z] * db for _ in range(db)]
    for i in range(db):
        for j in range(db):
            acc = z
            for k in range(da):
                acc = acc + m[k * db + i, k * db + j]
            rows[i][j] = acc
    return CMatrix._trusted(rows, m.backend)


def mix_kraus(ch: KrausChannel, w: CMatrix) -> KrausChannel:
    """Equivalent Kraus family ``V'_j = sum_k w[j, k] V_k`` (``w`` an isometry)."""
    ops = []
    for j in range(w.nrows):
        acc = CMatrix.zeros(ch.dim_out, ch.dim_in, ch.backend)
        for k, v in enumerate(ch.kraus):
            acc = acc + v.scale(w[j, k])
        ops.append(acc)
    return KrausChannel(tuple(ops))


def nc_graph(ch: KrausChannel, tol: float = DEFAULT_TOL) -> Subspace:
    """Span of all ``V_j^* V_k``."""
    prods = [vj.adjoint() @ vk for vj in ch.kraus for vk in ch.kraus]
    return span_basis(prods, tol)


def graph_via_dual(ch: KrausChannel, tol: float = DEFAULT_TOL) -> Subspace:
    """Image of all environment matrix units under the dual of the complementary channel."""
    comp = complementary_channel(ch)
    e = ch.env_dim
    images = [dual(comp, CMatrix.unit(j, k, e, backend=ch.backend)) for j in range(e) for k in range(e)]
    return span_basis(images, tol)


def is_operator_system(space: Subspace, tol: float = DEFAULT_TOL) -> bool:
    return is_operator_system_span(space, tol)


# ---------------------------------------------------------------------------
# random channels and Choi machinery (float backend)

def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_channel(dim_in: int, dim_out: int, n_kraus: int, rng: np.random.Generator) -> KrausChannel:
    """Haar-random isometry ``H_A -> H_B (x) H_E`` cut into Kraus operators."""
    big = dim_out * n_kraus
    if big < dim_in:
        raise ChannelError("dim_out * n_kraus must be at least dim_in")
    z = rng.standard_normal((big, dim_in)) + 1j * rng.standard_normal((big, dim_in))
    q, _ = np.linalg.qr(z)
    ops = [CMatrix.from_numpy(q[k * dim_out:(k + 1) * dim_out, :]) for k in range(n_kraus)]
    return KrausChannel(tuple(ops))


def random_density(n: int, rng: np.random.Generator) -> CMatrix:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = a @ a.conj().T
    return CMatrix.from_numpy(rho / np.trace(rho))


def random_matrix(n: int, rng: np.random.Generator, m: int | None = None) -> CMatrix:
    m = n if m is None else m
    return CMatrix.from_numpy(rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m)))


def choi_matrix(linear_map: Callable[[np.ndarray], np.ndarray], dim_in: int, dim_out: int) -> np.ndarray:
    """``J = sum_{a,b} |a><b| (x) Phi(|a><b|)``."""
    J = np.zeros((dim_in * dim_out, dim_in * dim_out), dtype=complex)
    for a in range(dim_in):
        for b in range(dim_in):
            e = np.zeros((dim_in, dim_in), dtype=complex)
            e[a, b] = 1
            J[a * dim_out:(a + 1) * dim_out, b * dim_out:(b + 1) * dim_out] = linear_map(e)
    return J


def kraus_from_choi(J: np.ndarray, dim_in: int, dim_out: int, cutoff: float = 1e-10) -> KrausChannel:
    """Kraus operators from the spectral decomposition of a PSD Choi matrix."""
    J = (J + J.conj().T) / 2
    vals, vecs = np.linalg.eigh(J)
    if vals.min() < -max(cutoff, cutoff * abs(vals).max()):
        raise ChannelError("Choi matrix is not positive semidefinite: map is not completely positive")
    ops = []
    for lam, v in zip(vals, vecs.T):
        if lam <= cutoff:
            continue
        K = np.sqrt(lam) * v.reshape(dim_in, dim_out).T
        ops.append(CMatrix.from_numpy(K))
    if not ops:
        raise ChannelError("Choi matrix is zero")
    return KrausChannel(tuple(ops))


@dataclass(frozen=True)
class GramFrame:
    """Vectors ``psi_i`` resolving the identity and a unit-diagonal Gram matrix ``C``."""

    vectors: np.ndarray  # shape (m, d): row i is psi_i
    gram: np.ndarray     # shape (m, m)

    def __post_init__(self):
        object.__setattr__(self, "vectors", np.atleast_2d(np.asarray(self.vectors, dtype=complex)))
        object.__setattr__(self, "gram", np.atleast_2d(np.asarray(self.gram, dtype=complex)))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    def validate(self, tol: float = 1e-9) -> GramFrame:
        C, psi = self.gram, self.vectors
        m = self.size
        if C.shape != (m, m):
            raise ChannelError(f"invalid Gram matrix: expected {m}x{m}, got {C.shape[0]}x{C.shape[1]}")
        if np.abs(C - C.conj().T).max() > tol or np.abs(np.diag(C) - 1).max() > tol:
            raise ChannelError("invalid Gram matrix: not Hermitian with unit diagonal")
        if np.linalg.eigvalsh((C + C.conj().T) / 2).min() < -tol:
            raise ChannelError("invalid Gram matrix: not positive semidefinite")
        resolution = sum(np.outer(p, p.conj()) for p in psi)
        if np.abs(resolution - np.eye(self.dim)).max() > tol:
            raise ChannelError("invalid frame: sum |psi_i><psi_i| is not the identity")
        return self

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """``sum_{jk} c_jk <psi_j|rho|psi_k> |j><k|`` evaluated directly."""
        psi = self.vectors
        inner = psi.conj() @ rho @ psi.T
        return self.gram * inner


def pseudo_diagonal(frame: GramFrame, tol: float = 1e-9) -> KrausChannel:
    """Kraus form of the pseudo-diagonal channel of ``frame`` via its Choi matrix."""
    frame.validate(tol)
    J = choi_matrix(frame.apply, frame.dim, frame.size)
    return kraus_from_choi(J, frame.dim, frame.size)


def duality_gap(ch: KrausChannel, rho: CMatrix, x: CMatrix) -> float:
    """``|Tr(rho Phi^*(x)) - Tr(Phi(rho) x)|``."""
    lhs = (rho @ dual(ch, x)).trace()
    rhs = (apply(ch, rho) @ x).trace()
    return float(abs(lhs - rhs))


def graph_matches(ch: KrausChannel, target: Subspace, tol: float = DEFAULT_TOL) -> bool:
    from .linalg import subspace_equal

    g = nc_graph(ch, tol)
    if g.shape != target.shape:
        return False
    return subspace_equal(g, target, tol)


def channel_from_numpy(ops: Sequence[np.ndarray]) -> KrausChannel:
    return KrausChannel(tuple(CMatrix.from_numpy(o) for o in ops))
