import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stskdm.channel import (
    ChannelBlock,
    db2lin,
    equivalent_channel,
    ls_estimate,
    perturb_csir,
    sample_channel,
    transmit,
)
from stskdm.codebook import k_vector, vec
from stskdm.rng import crandn, stream


def test_db2lin():
    assert db2lin(0) == 1.0
    assert db2lin(20) == pytest.approx(100.0)
    assert db2lin(-10) == pytest.approx(0.1)


def test_noiseless_transmit(cda_cb):
    blk = sample_channel(3, 2, stream(0, 1), rho=10.0)
    X = cda_cb.codewords[5]
    obs = transmit(blk, X)
    np.testing.assert_allclose(obs.Y, math.sqrt(10.0 / 2) * blk.H @ X)
    np.testing.assert_allclose(obs.y_bar, vec(obs.Y))
    assert obs.H_bar.shape == (6, 4)
    with pytest.raises(ValueError):
        transmit(blk, np.ones((3, 2)))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(1, 4), snr=st.floats(-10, 30))
def test_vectorised_model_matches_matrix_model(fec_cb, seed, N, snr):
    # y = gain * (I_T kron H) chi k  equals  vec(gain * H s A_p)
    rng = stream(seed, 0)
    rho = db2lin(snr)
    blk = sample_channel(N, 2, rng, rho)
    p, q = int(rng.integers(4)), int(rng.integers(4))
    s = fec_cb.constellation.points[q]
    direct = vec(transmit(blk, fec_cb.codeword(p, q)).Y)
    kv = k_vector(p, s, fec_cb.Q).vector
    via_chi = blk.gain * equivalent_channel(blk.H, 2) @ fec_cb.chi @ kv
    np.testing.assert_allclose(via_chi, direct, atol=1e-12, rtol=0)


def test_noise_statistics():
    rng = stream(1, 2)
    z = crandn(rng, 200_000, 0.5)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(0.5, rel=0.02)
    assert abs(np.mean(z.real * z.imag)) < 5e-3
    assert np.var(z.real) == pytest.approx(0.25, rel=0.02)


def test_noise_is_added_with_variance_n0():
    blk = ChannelBlock(np.zeros((2, 2), complex), 1.0, N0=2.0)
    Y = np.stack([transmit(blk, np.eye(2), stream(0, i)).Y for i in range(20_000)])
    assert np.mean(np.abs(Y) ** 2) == pytest.approx(2.0, rel=0.03)


def test_perturb_csir():
    H = crandn(stream(0, 3), (2, 2))
    same = perturb_csir(H, 0.0, stream(0, 4))
    np.testing.assert_array_equal(same, H)
    assert same is not H
    E = np.stack([perturb_csir(H, 0.1, stream(0, 5, i)) - H for i in range(5000)])
    assert np.mean(np.abs(E) ** 2) == pytest.approx(0.1, rel=0.05)
    with pytest.raises(ValueError):
        perturb_csir(H, -1, stream(0, 6))


def test_ls_recovers_channel_without_noise(fec_cb):
    rho = db2lin(12)
    H = crandn(stream(0, 7), (2, 2))
    Xs = [fec_cb.codewords[0], fec_cb.codewords[4]]
    Ys = [math.sqrt(rho / 2) * H @ X for X in Xs]
    np.testing.assert_allclose(ls_estimate(Ys, Xs, rho), H, atol=1e-12)
    # a single full-rank block is enough when M = T
    np.testing.assert_allclose(ls_estimate(Ys[:1], Xs[:1], rho), H, atol=1e-12)


def test_ls_matches_lstsq(fec_cb):
    rho = 3.0
    rng = stream(0, 8)
    X = np.concatenate([fec_cb.codewords[c] for c in (1, 6, 11)], axis=1)
    Y = crandn(rng, (3, 6))
    ref = np.linalg.lstsq((math.sqrt(rho / 2) * X).T, Y.T, rcond=None)[0].T
    np.testing.assert_allclose(ls_estimate([Y], [X], rho), ref, atol=1e-12)


def test_ls_batch_shapes(fec_cb):
    rho = 5.0
    H = crandn(stream(0, 9), (7, 3, 2))
    X = np.broadcast_to(fec_cb.codewords[2], (7, 2, 2))
    Y = math.sqrt(rho / 2) * H @ X
    np.testing.assert_allclose(ls_estimate([Y], [X], rho), H, atol=1e-11)


def test_ls_rank_deficient_raises():
    X = np.array([[1, 1], [1, 1]], dtype=complex)
    with pytest.raises(np.linalg.LinAlgError):
        ls_estimate([np.ones((2, 2))], [X], 1.0)
