import random

import numpy as np
import pytest

from thetagraph.algebra import (
    MatrixAlgebra,
    algebra_unit,
    associativity_defect,
    block_decompose,
    center,
    central_idempotents,
    exact_roots,
    generate_algebra,
    minimal_polynomial,
    radical,
)
from thetagraph.graph import build_generators
from thetagraph.linalg import CMatrix, subspace_equal
from thetagraph.scalars import EXACT, FLOAT, QQi, parse_theta

from conftest import EXACT_SAMPLE, FLOAT_SAMPLE, KLEIN_SAMPLE
from oracles import numpy_word_rank, random_generator_sets, word_span


def E(i, j, n=3):
    return CMatrix.unit(i, j, n)


def theta_of(text):
    return parse_theta(text, FLOAT if text.startswith("exp") else EXACT)


@pytest.mark.parametrize("text, dim", [(t, 8) for t in EXACT_SAMPLE + FLOAT_SAMPLE] + [(t, 4) for t in KLEIN_SAMPLE])
def test_generated_dimension(text, dim):
    alg = generate_algebra(build_generators(theta_of(text)).as_list())
    assert alg.dimension == dim


@pytest.mark.parametrize("text", ["2", "3/5+4/5i"])
def test_exact_and_float_agree(text):
    th = theta_of(text)
    gens = build_generators(th).as_list()
    exact = generate_algebra(gens)
    flt = generate_algebra([g.to_backend(FLOAT) for g in gens])
    assert exact.dimension == flt.dimension == 8


def test_matches_word_span_oracle():
    rng = random.Random(2024)
    for kind, gens in random_generator_sets(rng, 10):
        alg = generate_algebra(gens)
        oracle = word_span(gens, 6)
        assert subspace_equal(alg.space, oracle), kind
        assert alg.dimension == numpy_word_rank(gens, 4 if len(gens) == 2 else 6)


@pytest.mark.parametrize("gens, dim", [
    ([E(0, 1)], 2),                                # I, N
    ([E(0, 0), E(1, 1)], 3),                       # diagonal
    ([E(0, 1), E(1, 2)], 4),                       # I, N1, N2, N1N2
    ([E(0, 1), E(1, 0)], 5),                       # Mat2 + C
    ([E(0, 1), E(1, 2), E(2, 0)], 9),              # full Mat3
])
def test_small_algebras(gens, dim):
    assert generate_algebra(gens).dimension == dim


def test_without_identity():
    alg = generate_algebra([E(0, 1)], include_identity=False)
    assert alg.dimension == 1 and not alg.contains_identity


def test_structure_constants_reproduce_products():
    alg = generate_algebra(build_generators(theta_of("2")).as_list())
    assert associativity_defect(alg) == 0
    for i, a in enumerate(alg.basis):
        for j, b in enumerate(alg.basis):
            assert alg.element(alg.structure_constants[i][j]) == a @ b


def test_upper_triangular_structure():
    gens = [E(0, 0), E(1, 1), E(0, 1), E(1, 2), E(0, 2)]
    alg = generate_algebra(gens)
    assert alg.dimension == 6
    rad = radical(alg)
    assert rad.dim == 3
    for a in rad.basis:
        for b in rad.basis:
            for c in rad.basis:
                assert (a @ b @ c).is_zero(0)
    rep = block_decompose(alg)
    assert rep.radical_dim == 3
    assert [tuple(b) for b in rep.blocks] == [(1, True, 1)] * 3


def test_block_diagonal_structure():
    gens = [E(0, 1), E(1, 0), E(2, 2)]
    rep = block_decompose(generate_algebra(gens))
    assert rep.profile == "Mat2+Mat1"
    assert rep.center_dim == 2 and rep.residual == 0


@pytest.mark.parametrize("text", EXACT_SAMPLE + FLOAT_SAMPLE + KLEIN_SAMPLE)
def test_m_theta_blocks(text):
    th = theta_of(text)
    rep = block_decompose(generate_algebra(build_generators(th).as_list()))
    if th.is_plus_minus_one():
        assert rep.profile == "Mat1+Mat1+Mat1+Mat1" and rep.center_dim == 4
    else:
        assert rep.profile == "Mat2+Mat2" and rep.center_dim == 2
    assert rep.radical_dim == 0
    if rep.backend == EXACT:
        assert rep.residual == 0
    else:
        assert rep.residual <= 1e-10


def test_center_of_m_theta_is_spanned_by_one_and_z():
    gens = build_generators(theta_of("2"))
    z = center(generate_algebra(gens.as_list()))
    assert z.dim == 2 and gens.Z in z and gens.identity in z


@pytest.mark.parametrize("seed", range(5))
def test_idempotents_independent_of_seed(seed):
    alg = generate_algebra(build_generators(theta_of("3")).as_list())
    idem, _, backend = central_idempotents(alg, seed)
    assert backend == EXACT
    assert sum(idem[1:], idem[0]) == CMatrix.identity(4)
    for e in idem:
        assert e @ e == e


def test_algebra_unit_of_corner():
    alg = generate_algebra([E(0, 0), E(0, 1), E(1, 0)], include_identity=False)
    assert algebra_unit(alg) == E(0, 0) + E(1, 1)


def test_minimal_polynomial():
    m = CMatrix([[2, 0, 0], [0, 2, 0], [0, 0, 3]], EXACT)
    poly = minimal_polynomial(m, CMatrix.identity(3))
    assert poly == [QQi(6), QQi(-5), QQi(1)]


def test_exact_roots_split_and_nonsplit():
    # (t - 1/2)(t + i)
    half = QQi(1) / 2
    poly = [QQi(0, -1) * half, QQi(0, 1) - half, QQi(1)]
    roots = exact_roots(poly)
    assert sorted(roots, key=lambda r: (r.real, r.imag)) == [QQi(0, -1), QQi(1) / 2]
    assert exact_roots([QQi(-2), QQi(0), QQi(1)]) is None


def test_float_fallback_is_flagged():
    # the center element t -> sqrt(2)-eigenvalue forces a non-split polynomial
    s = CMatrix([[0, 2], [1, 0]], EXACT)
    alg = MatrixAlgebra.from_basis([CMatrix.identity(2), s])
    rep = block_decompose(alg)
    assert rep.backend == FLOAT and rep.downgraded
    assert rep.profile == "Mat1+Mat1"
