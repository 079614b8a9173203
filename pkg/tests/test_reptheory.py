import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thetagraph.graph import build_generators
from thetagraph.linalg import CMatrix
from thetagraph.reptheory import (
    Character,
    canonical_value,
    commutant,
    decompose_phi,
    induce,
    intertwiners,
    is_irreducible,
)
from thetagraph.scalars import EXACT, FLOAT, QQi, Theta, parse_theta

from conftest import EXACT_SAMPLE, FLOAT_SAMPLE, KLEIN_SAMPLE, nonzero_gaussian


def theta_of(text):
    return parse_theta(text, FLOAT if text.startswith("exp") else EXACT)


def test_induce_example():
    rep = induce(Character(QQi(2), QQi(1)))
    assert rep.R_g == CMatrix([[2, 0], [0, QQi(1) / 2]], EXACT)
    assert rep.R_x == CMatrix([[0, 1], [1, 0]], EXACT)
    assert rep.R_y == rep.R_x @ rep.R_g


@given(nonzero_gaussian, st.sampled_from([1, -1]))
def test_induce_satisfies_group_relations(cg, cz):
    rep = induce(Character(cg, QQi(cz)))
    assert rep.relation_residual() == 0
    I = CMatrix.identity(2)
    assert rep.R_x @ rep.R_x == I and rep.R_y @ rep.R_y == I and rep.R_z @ rep.R_z == I
    assert rep.R_x @ rep.R_g @ rep.R_x @ rep.R_g == I


@pytest.mark.parametrize("cg, irreducible", [(2, True), (QQi(0, 1), True), (1, False), (-1, False)])
def test_irreducibility(cg, irreducible):
    assert is_irreducible(induce(Character(QQi(cg), QQi(1)))) == irreducible


def test_character_validation():
    with pytest.raises(ValueError):
        Character(QQi(0), QQi(1))
    with pytest.raises(ValueError):
        Character(QQi(2), QQi(2))


def test_commutant_dimensions():
    assert commutant([CMatrix.identity(4)]).dim == 16
    assert commutant(build_generators(theta_of("2")).as_list()).dim == 2
    assert commutant(build_generators(theta_of("1")).as_list()).dim == 4


def test_intertwiners_between_equivalent_reps():
    a = induce(Character(QQi(2), QQi(1)))
    b = induce(Character(QQi(1) / 2, QQi(1)))
    c = induce(Character(QQi(-2), QQi(-1)))
    assert intertwiners(a.as_list(), b.as_list()).dim == 1
    assert intertwiners(a.as_list(), c.as_list()).dim == 0


@pytest.mark.parametrize("mu, want", [
    (QQi(2), QQi(2)), (QQi(1) / 2, QQi(2)), (QQi(-2), QQi(-2)), (QQi(0, 1), QQi(0, 1)), (QQi(0, -1), QQi(0, 1)),
])
def test_canonical_value(mu, want):
    assert canonical_value(mu) == want


def test_theta_two():
    rep = decompose_phi(theta_of("2"))
    assert rep.backend == EXACT and rep.residual == 0
    assert sorted(b.dim for b in rep.blocks) == [2, 2]
    chars = {(b.character.chi_g, b.character.chi_z) for b in rep.blocks}
    assert chars == {(QQi(2), QQi(1)), (QQi(-2), QQi(-1))}
    assert all(b.irreducible for b in rep.blocks)
    assert list(rep.block_intertwiner_dims().values()) == [0]
    # eigenvalues of phi(g) oracle
    g = build_generators(theta_of("2")).G.to_numpy()
    assert np.allclose(sorted(np.linalg.eigvals(g).real), [-2, -0.5, 0.5, 2])


@pytest.mark.parametrize("text", KLEIN_SAMPLE)
def test_klein(text):
    rep = decompose_phi(theta_of(text))
    assert [b.dim for b in rep.blocks] == [1, 1, 1, 1]
    assert rep.residual == 0
    assert rep.klein_residual() == 0
    for b in rep.blocks:
        x, y, z = (b.matrices[k][0, 0] for k in "xyz")
        assert x * y == y * x
        assert x * y == QQi(int(text)) * z


def test_theta_i_blocks_split_by_z():
    rep = decompose_phi(theta_of("i"))
    assert {b.character.chi_z for b in rep.blocks} == {QQi(1), QQi(-1)}
    assert {b.character.chi_g for b in rep.blocks} == {QQi(0, 1)}


@pytest.mark.parametrize("text", EXACT_SAMPLE + FLOAT_SAMPLE)
def test_blocks_match_induced(text):
    th = theta_of(text)
    rep = decompose_phi(th)
    assert rep.residual <= (0 if rep.backend == EXACT else 1e-10)
    for b in rep.blocks:
        ind = induce(b.character, rep.backend)
        for key, want in zip("xyz", ind.as_list()):
            assert b.matrices[key].allclose(want, 1e-10)


@pytest.mark.parametrize("text", EXACT_SAMPLE + FLOAT_SAMPLE + KLEIN_SAMPLE)
def test_change_of_basis_conjugates(text):
    th = theta_of(text)
    rep = decompose_phi(th)
    S = rep.change_of_basis.to_numpy()
    Sinv = np.linalg.inv(S)
    gens = build_generators(th)
    bounds, lo = [], 0
    for b in rep.blocks:
        bounds.append((lo, lo + b.dim))
        lo += b.dim
    for key, m in zip("xyz", gens.as_list()):
        conj = Sinv @ m.to_numpy() @ S
        for (a, c), blk in zip(bounds, rep.blocks):
            assert np.allclose(conj[a:c, a:c], blk.matrices[key].to_numpy(), atol=1e-9)
        mask = np.ones_like(conj, dtype=bool)
        for a, c in bounds:
            mask[a:c, a:c] = False
        assert np.abs(conj[mask]).max(initial=0) < 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_seed_independent(seed):
    rep = decompose_phi(theta_of("3/5+4/5i"), seed=seed)
    assert rep.residual == 0
    assert [b.character for b in rep.blocks] == [b.character for b in decompose_phi(theta_of("3/5+4/5i")).blocks]
