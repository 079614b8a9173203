import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thetagraph.linalg import (
    CMatrix,
    Echelon,
    Subspace,
    inverse,
    kron,
    nullspace,
    rank,
    rref,
    solve,
    solve_homogeneous,
    span_basis,
    subspace_equal,
)
from thetagraph.scalars import EXACT, FLOAT, BackendMismatch, QQi

from conftest import gaussian


def random_exact(rng, m, n, r=None):
    """m x n Gaussian-integer matrix of rank <= r (product of two random factors)."""
    r = min(m, n) if r is None else r
    ent = lambda: QQi(rng.randint(-3, 3), rng.randint(-3, 3))
    B = CMatrix([[ent() for _ in range(r)] for _ in range(m)], EXACT) if r else CMatrix.zeros(m, n)
    if not r:
        return B
    C = CMatrix([[ent() for _ in range(n)] for _ in range(r)], EXACT)
    return B @ C


def square_matrices(n):
    return st.lists(st.lists(gaussian, min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda rows: CMatrix(rows, EXACT))


@given(square_matrices(3), square_matrices(3), square_matrices(3))
def test_matrix_ring_laws(a, b, c):
    assert (a @ b) @ c == a @ (b @ c)
    assert a @ (b + c) == a @ b + a @ c
    assert (a @ b).adjoint() == b.adjoint() @ a.adjoint()
    assert (a @ b).trace() == (b @ a).trace()


def test_rank_nullity_exact_and_float():
    rng = random.Random(7)
    for trial in range(100):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        r = rng.randint(0, min(m, n))
        a = random_exact(rng, m, n, r)
        rk = rank(a.rows, n, EXACT)
        ker = nullspace(a.rows, n, EXACT)
        assert rk + len(ker) == n
        for v in ker:
            assert all(sum((x * y for x, y in zip(row, v)), QQi(0)) == QQi(0) for row in a.rows)
        # float backend and numpy agree with exact rank
        af = a.to_backend(FLOAT)
        assert rank(af.rows, n, FLOAT) == rk
        assert np.linalg.matrix_rank(af.to_numpy()) == rk
        fker = nullspace(af.rows, n, FLOAT)
        assert rk + len(fker) == n
        for v in fker:
            assert np.abs(af.to_numpy() @ np.array(v)).max() < 1e-9


def test_rref_pivots_are_unit_columns():
    rng = random.Random(3)
    a = random_exact(rng, 4, 6, 3)
    red, piv = rref(a.rows, 6, EXACT)
    assert len(piv) == 3
    for r, p in enumerate(piv):
        assert [red[k][p] for k in range(4)] == [QQi(1) if k == r else QQi(0) for k in range(4)]


def test_solve_and_inverse():
    rng = random.Random(11)
    for _ in range(20):
        a = random_exact(rng, 4, 4)
        if rank(a.rows, 4, EXACT) < 4:
            continue
        ai = inverse(a)
        assert a @ ai == CMatrix.identity(4)
        b = random_exact(rng, 4, 2)
        x = solve(a, b)
        assert a @ x == b


def test_solve_inconsistent_returns_none():
    a = CMatrix([[1, 0], [0, 0]], EXACT)
    b = CMatrix([[1], [1]], EXACT)
    assert solve(a, b) is None


def test_singular_inverse():
    with pytest.raises(ZeroDivisionError):
        inverse(CMatrix([[1, 2], [2, 4]], EXACT))


def test_kron_matches_numpy():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    b = rng.standard_normal((3, 2))
    out = kron(CMatrix.from_numpy(a), CMatrix.from_numpy(b + 0j))
    assert np.allclose(out.to_numpy(), np.kron(a, b))


def test_backend_mismatch():
    with pytest.raises(BackendMismatch):
        CMatrix.identity(2, EXACT) + CMatrix.identity(2, FLOAT)


def test_echelon_coordinates():
    ech = Echelon(3, EXACT)
    assert ech.insert([QQi(1), QQi(2), QQi(0)])
    assert ech.insert([QQi(0), QQi(1), QQi(1)])
    assert not ech.insert([QQi(2), QQi(5), QQi(1)])
    assert ech.coordinates([QQi(2), QQi(5), QQi(1)]) == [QQi(2), QQi(1)]
    assert ech.coordinates([QQi(0), QQi(0), QQi(1)]) is None


def test_subspace_membership_and_equality():
    e = [CMatrix.unit(i, j, 2) for i in range(2) for j in range(2)]
    diag = Subspace([e[0], e[3]])
    assert CMatrix.identity(2) in diag
    assert e[1] not in diag
    other = span_basis([e[0] + e[3], e[0] - e[3], e[0]])
    assert other.dim == 2
    assert subspace_equal(diag, other)
    assert not subspace_equal(diag, span_basis(e[:2]))
    assert diag.combine(diag.coordinates(CMatrix.identity(2).scale(QQi(3)))) == CMatrix.identity(2).scale(QQi(3))


def test_dependent_basis_rejected():
    with pytest.raises(ValueError):
        Subspace([CMatrix.identity(2), CMatrix.identity(2).scale(QQi(2))])


def test_solve_homogeneous_is_column_subspace():
    a = CMatrix([[1, 1, 0], [0, 0, 1]], EXACT)
    ker = solve_homogeneous(a)
    assert ker.dim == 1 and ker.shape == (3, 1)
    assert (a @ ker.basis[0]).is_zero(0)


def test_float_tolerance():
    a = CMatrix([[1.0, 0.0], [0.0, 1e-14]])
    assert rank(a.rows, 2, FLOAT, tol=1e-9) == 1
    assert rank(a.rows, 2, FLOAT, tol=1e-16) == 2
