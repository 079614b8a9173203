import numpy as np
import pytest

from thetagraph.channels import (
    ChannelError,
    GramFrame,
    KrausChannel,
    apply,
    channel_from_numpy,
    choi_matrix,
    complementary,
    complementary_channel,
    dual,
    duality_gap,
    graph_matches,
    graph_via_dual,
    is_operator_system,
    kraus_from_choi,
    mix_kraus,
    nc_graph,
    partial_trace,
    pseudo_diagonal,
    random_channel,
    random_density,
    random_matrix,
    random_unitary,
    stinespring_isometry,
)
from thetagraph.graph import graph_span
from thetagraph.linalg import CMatrix, subspace_equal
from thetagraph.scalars import EXACT, FLOAT, QQi, parse_theta

E = lambda i, j, n=2: CMatrix.unit(i, j, n)
IDENTITY = KrausChannel((CMatrix.identity(2),))
AMPLITUDE = KrausChannel((E(0, 0), E(0, 1)))   # {|0><0|, |0><1|}
DEPHASING = KrausChannel((E(0, 0), E(1, 1)))


def rho_exact():
    return CMatrix([[QQi(1, 0) / 3, QQi(1, 1) / 5], [QQi(1, -1) / 5, QQi(2) / 3]], EXACT)


def random_channels(count, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        din, dout = rng.integers(1, 5, size=2)
        nk = int(rng.integers(1, 5))
        while dout * nk < din:
            nk += 1
        if nk > 4:
            dout = 4
            nk = max(1, -(-int(din) // 4))
        yield random_channel(int(din), int(dout), nk, rng), rng


def test_identity_channel():
    rho = rho_exact()
    assert apply(IDENTITY, rho) == rho
    assert dual(IDENTITY, rho) == rho
    assert complementary(IDENTITY, rho) == CMatrix([[rho.trace()]], EXACT)


def test_amplitude_reset():
    rho = rho_exact()
    out = apply(AMPLITUDE, rho)
    assert out == E(0, 0).scale(rho[0, 0] + rho[1, 1])
    assert out.trace() == rho.trace()


def test_dephasing_complementary():
    rho = rho_exact()
    assert complementary(DEPHASING, rho) == CMatrix([[rho[0, 0], 0], [0, rho[1, 1]]], EXACT)


def test_dimension_mismatch():
    with pytest.raises(ChannelError):
        apply(IDENTITY, CMatrix.identity(3))
    with pytest.raises(ChannelError):
        KrausChannel(())


def test_dual_of_identity_is_identity():
    for ch, _ in random_channels(10, 1):
        assert dual(ch, CMatrix.identity(ch.dim_out, FLOAT)).allclose(CMatrix.identity(ch.dim_in, FLOAT), 1e-12)


def test_duality_exact():
    rho, x = rho_exact(), CMatrix([[1, QQi(0, 2)], [3, QQi(-1, 1)]], EXACT)
    for ch in (IDENTITY, AMPLITUDE, DEPHASING):
        assert duality_gap(ch, rho, x) == 0


def test_duality_float():
    for ch, rng in random_channels(100, 2):
        rho = random_matrix(ch.dim_in, rng)
        x = random_matrix(ch.dim_out, rng)
        assert duality_gap(ch, rho, x) <= 1e-12


def test_complementary_preserves_trace():
    for ch, rng in random_channels(30, 3):
        rho = random_density(ch.dim_in, rng)
        assert abs(complementary(ch, rho).trace() - 1) < 1e-12
        assert abs(apply(ch, rho).trace() - 1) < 1e-12


def test_stinespring_partial_traces():
    for ch, rng in random_channels(20, 4):
        V = stinespring_isometry(ch)
        assert (V.adjoint() @ V).allclose(CMatrix.identity(ch.dim_in, FLOAT), 1e-12)
        rho = random_density(ch.dim_in, rng)
        big = V @ rho @ V.adjoint()
        dims = (ch.dim_out, ch.env_dim)
        assert partial_trace(big, dims, 0).allclose(apply(ch, rho), 1e-12)
        assert partial_trace(big, dims, 1).allclose(complementary(ch, rho), 1e-12)


def test_complementary_channel_kraus():
    for ch, rng in random_channels(20, 5):
        comp = complementary_channel(ch)
        assert comp.is_trace_preserving(1e-12)
        rho = random_matrix(ch.dim_in, rng)
        assert apply(comp, rho).allclose(complementary(ch, rho), 1e-12)


@pytest.mark.parametrize("ch, dim", [(IDENTITY, 1), (AMPLITUDE, 4), (DEPHASING, 2)])
def test_graph_examples(ch, dim):
    g = nc_graph(ch)
    assert g.dim == dim
    assert subspace_equal(g, graph_via_dual(ch))
    assert is_operator_system(g)


def test_graph_identities_random():
    for ch, rng in random_channels(100, 6):
        g = nc_graph(ch)
        assert subspace_equal(g, graph_via_dual(ch))
        assert is_operator_system(g)
        w = CMatrix.from_numpy(random_unitary(ch.env_dim, rng))
        assert subspace_equal(g, nc_graph(mix_kraus(ch, w)))


def test_mixing_preserves_channel():
    ch, rng = next(random_channels(1, 7))
    mixed = mix_kraus(ch, CMatrix.from_numpy(random_unitary(ch.env_dim, rng)))
    rho = random_density(ch.dim_in, rng)
    assert apply(ch, rho).allclose(apply(mixed, rho), 1e-12)


def test_choi_round_trip():
    for ch, rng in random_channels(20, 8):
        def linear(m, ch=ch):
            return apply(ch, CMatrix.from_numpy(m)).to_numpy()

        J = choi_matrix(linear, ch.dim_in, ch.dim_out)
        back = kraus_from_choi(J, ch.dim_in, ch.dim_out)
        assert back.is_trace_preserving(1e-10)
        rho = random_matrix(ch.dim_in, rng)
        assert apply(back, rho).allclose(apply(ch, rho), 1e-10)
        assert subspace_equal(nc_graph(back, 1e-8), nc_graph(ch, 1e-8), 1e-8)


def test_choi_rejects_non_cp():
    J = choi_matrix(lambda m: m.T, 2, 2)   # transpose map
    with pytest.raises(ChannelError, match="positive"):
        kraus_from_choi(J, 2, 2)


def test_pseudo_diagonal_dephasing():
    ch = pseudo_diagonal(GramFrame(np.eye(3), np.eye(3)))
    rng = np.random.default_rng(9)
    rho = random_matrix(3, rng).to_numpy()
    assert np.allclose(apply(ch, CMatrix.from_numpy(rho)).to_numpy(), np.diag(np.diag(rho)))
    assert nc_graph(ch).dim == 3


def test_pseudo_diagonal_all_ones_is_identity():
    ch = pseudo_diagonal(GramFrame(np.eye(2), np.ones((2, 2))))
    rng = np.random.default_rng(10)
    rho = random_matrix(2, rng)
    assert apply(ch, rho).allclose(rho, 1e-10)


def test_pseudo_diagonal_generic_frame():
    rng = np.random.default_rng(11)
    for _ in range(10):
        d, m = 2, 3
        # resolution of identity from the rows of a 3x2 isometry
        psi = np.linalg.qr(rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d)))[0]
        vecs = rng.standard_normal((m, 3)) + 1j * rng.standard_normal((m, 3))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        frame = GramFrame(psi.conj(), vecs.conj() @ vecs.T)
        ch = pseudo_diagonal(frame)
        assert ch.trace_preservation_residual() <= 1e-10
        rho = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        assert np.allclose(apply(ch, CMatrix.from_numpy(rho)).to_numpy(), frame.apply(rho), atol=1e-10)


def test_frame_validation():
    with pytest.raises(ChannelError, match="invalid Gram matrix"):
        pseudo_diagonal(GramFrame(np.eye(2), np.array([[1, 2], [2, 1]])))
    with pytest.raises(ChannelError, match="invalid frame"):
        pseudo_diagonal(GramFrame(np.eye(2) * 2, np.eye(2)))


def test_validate_reports_residual():
    bad = channel_from_numpy([np.diag([1.0, 2.0])])
    with pytest.raises(ChannelError, match="residual"):
        bad.validate()


def test_graph_matches_theta():
    # any channel whose Kraus products span L(theta) matches; the full Mat4 does not
    th = parse_theta("i")
    target = graph_span(th)
    assert not graph_matches(KrausChannel((CMatrix.identity(2),)), target)
    rng = np.random.default_rng(12)
    assert not graph_matches(random_channel(4, 4, 4, rng), graph_span(parse_theta("1", FLOAT)))
