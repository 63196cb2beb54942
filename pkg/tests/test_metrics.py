import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stskdm.codebook import expand
from stskdm.constellation import make_psk
from stskdm.dispersion import cda_dm_set, fec_dm_set, random_dm_set
from stskdm.metrics import (
    code_metrics,
    coding_gain,
    diversity_order,
    enumerate_configs,
    estimate_dcmc,
    rate_cda,
    rate_ldc,
    rate_stsk,
)
from stskdm.rng import CAPACITY, crandn, stream

from _oracles import coding_gain_loop, dcmc_direct

# frozen by coding_gain_loop on the same codebooks
FROZEN_GAINS = {
    "fec_qpsk": 1.0,
    "cda_bpsk": 1.0,
    "co8": 0.045558,
    "fec_16psk_dms": 0.0057943,
}


def test_gains_against_loop_oracle(fec_cb, cda_cb, co8_cb):
    for cb in (fec_cb, cda_cb, co8_cb):
        assert coding_gain(cb) == pytest.approx(coding_gain_loop(cb.codewords), rel=1e-12)
        assert coding_gain(cb, root=True) == pytest.approx(coding_gain_loop(cb.codewords, True), rel=1e-12)


def test_frozen_gains(fec_cb, cda_cb, co8_cb, qpsk):
    assert coding_gain(fec_cb) == pytest.approx(FROZEN_GAINS["fec_qpsk"], abs=1e-9)
    assert coding_gain(cda_cb) == pytest.approx(FROZEN_GAINS["cda_bpsk"], abs=1e-9)
    assert coding_gain(co8_cb) == pytest.approx(FROZEN_GAINS["co8"], rel=1e-4)
    cb = expand(qpsk, fec_dm_set(make_psk(16)))
    assert coding_gain(cb) == pytest.approx(FROZEN_GAINS["fec_16psk_dms"], rel=1e-4)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), Q=st.sampled_from([2, 3, 4]))
def test_gain_loop_agreement_on_random_sets(seed, Q):
    cb = expand(make_psk(2), random_dm_set(Q, 2, stream(seed, 0)))
    assert coding_gain(cb) == pytest.approx(coding_gain_loop(cb.codewords), rel=1e-9)


def test_blockwise_reduction_matches_single_block(cda_cb):
    from stskdm.metrics import _pairwise_reduce

    def mins(D):
        return np.abs(np.linalg.det(D @ np.conj(np.swapaxes(D, -1, -2)))).min()

    assert min(_pairwise_reduce(cda_cb, mins, block=3)) == pytest.approx(coding_gain(cda_cb))


def test_diversity(fec_cb, cda_cb, bpsk):
    assert diversity_order(fec_cb) == 2
    assert diversity_order(cda_cb) == 2
    # two rank-one DMs: the pair difference within one DM has rank one
    A = np.array([[[math.sqrt(2), 0], [0, 0]], [[0, 0], [0, math.sqrt(2)]]], dtype=complex)
    from stskdm.dispersion import DispersionMatrixSet
    cb = expand(bpsk, DispersionMatrixSet(A, "CO"))
    assert diversity_order(cb) == 1
    assert coding_gain(cb) == 0.0


def test_code_metrics_bundle(fec_cb):
    m = code_metrics(fec_cb)
    assert (m.coding_gain, m.diversity_order, m.rate_bpcu) == (pytest.approx(1.0), 2, 2.0)


def test_rates():
    assert rate_stsk(4, 4, 2) == 2.0
    assert rate_stsk(8, 2, 2) == 2.0
    assert rate_ldc(2, 1, 4, 2) == 2.0
    assert rate_cda(2, 1, 1, 2, 2) == 2.0
    assert rate_cda(2, 2, 1, 4, 2) == 3.0


@pytest.mark.parametrize("R,T", [(1, 2), (1.5, 2), (2, 2), (2.5, 2), (5, 4)])
def test_enumerate_configs(R, T):
    opts = enumerate_configs(R, T)
    assert len(opts) == R * T + 1
    assert all(math.log2(o.Q * o.L) / T == R for o in opts)
    assert len({(o.Q, o.L) for o in opts}) == len(opts)


def test_enumerate_configs_rejects_fractional_bits():
    with pytest.raises(ValueError):
        enumerate_configs(1.25, 2)


def test_dcmc_matches_direct_oracle(cda_cb):
    # regenerate the draws of the single chunk and sum explicitly
    n, snr = 60, 6.0
    rng = stream(3, CAPACITY, 0)
    k = rng.integers(0, cda_cb.size, size=n)
    H = crandn(rng, (n, 2, 2))
    Z = crandn(rng, (n, 2, 2))
    want = dcmc_direct(cda_cb.codewords, snr, H, Z, k)
    got = estimate_dcmc(cda_cb, snr, N=2, samples=n, rng_seed=3)
    assert got.value == pytest.approx(want, rel=1e-12)


def test_dcmc_limits(fec_cb):
    hi = estimate_dcmc(fec_cb, 60, samples=500)
    assert hi.value == pytest.approx(2.0, abs=1e-9)
    lo = estimate_dcmc(fec_cb, -40, samples=2000)
    assert abs(lo.value) < 5e-3
    assert lo.ci_low <= lo.value <= lo.ci_high


def test_dcmc_independent_of_chunking_and_executor(fec_cb):
    from concurrent.futures import ThreadPoolExecutor

    a = estimate_dcmc(fec_cb, 5, samples=3000, chunk=1000)
    with ThreadPoolExecutor(3) as ex:
        b = estimate_dcmc(fec_cb, 5, samples=3000, chunk=1000, executor=ex)
    assert a == b


def test_dcmc_monotone_under_common_draws(fec_cb):
    vals = [estimate_dcmc(fec_cb, s, samples=2000).value for s in (0, 5, 10, 15)]
    assert all(x < y for x, y in zip(vals, vals[1:]))
