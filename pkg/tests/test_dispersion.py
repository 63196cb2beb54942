import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stskdm.constellation import make_psk, make_square_qam
from stskdm.dispersion import (
    CdaParams,
    DispersionMatrixSet,
    FecParams,
    PowerConstraintError,
    base_psk_order,
    cda_codeword,
    cda_dm_set,
    co_dm_search,
    co_fixture_bpsk8,
    companion_matrix,
    fec_dm_set,
    format_dm_set,
    load_dm_set,
    parse_dm_set,
    power_errors,
    save_dm_set,
)

from _oracles import canon

R2 = math.sqrt(2)


def test_fec_qpsk_matches_hand_written_set(qpsk):
    # f_0 * I + C with C the companion matrix of x^2 - j, f_0 over QPSK
    want = np.array([
        [[1, 1j], [1, 1]],
        [[1j, 1j], [1, 1j]],
        [[-1, 1j], [1, -1]],
        [[-1j, 1j], [1, -1j]],
    ]) / R2
    got = fec_dm_set(qpsk, FecParams(M=2, pivot=1))
    np.testing.assert_allclose(got.matrices, want, atol=1e-15)
    assert got.family == "FEC"


def test_cda_bpsk_matches_closed_form(bpsk):
    t, d = 1j, cmath.exp(3j * math.pi / 8)
    want = []
    for f01 in (1, -1):
        for f10 in (1, -1):
            for f11 in (1, -1):
                want.append(np.array([[1 + f01 * t, d * (f10 - f11 * t)],
                                      [f10 + f11 * t, 1 - f01 * t]]) / 2)
    got = cda_dm_set(bpsk, CdaParams(M=2, t_phase=0.5, delta_phase=3 / 8))
    assert got.Q == 8
    assert canon(got.matrices) == canon(want)


def test_companion_characteristic_polynomial():
    rng = np.random.default_rng(1)
    for n in (1, 2, 3, 5):
        a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        C = companion_matrix(a)
        # np.poly gives leading-first coefficients of det(xI - C)
        np.testing.assert_allclose(np.poly(C), np.r_[1, a[::-1]], atol=1e-9)
    with pytest.raises(ValueError):
        companion_matrix([])


@pytest.mark.parametrize("L,M,pivot", [(2, 2, 0), (4, 2, 0), (8, 2, 1), (4, 3, 2), (2, 4, 1)])
def test_fec_sizes_and_power(L, M, pivot):
    dms = fec_dm_set(make_psk(L), M=M, pivot=pivot)
    assert dms.Q == L ** (M - 1)
    assert power_errors(dms.matrices).max() < 1e-9
    assert dms.is_distinct()


@pytest.mark.parametrize("L,M,r", [(4, 3, 1), (4, 3, 2), (2, 4, 3)])
def test_fec_subset_sizes(L, M, r):
    assert fec_dm_set(make_psk(L), M=M, subset=r).Q == L ** (M - r)


@settings(max_examples=40, deadline=None)
@given(t=st.floats(0, 2), d=st.floats(0, 2), eps=st.floats(0, 0.05),
       L=st.sampled_from([2, 4]), sub=st.sampled_from([None, (1, 1), (2, 1)]))
def test_cda_power_holds_for_any_unit_modulus_parameters(t, d, eps, L, sub):
    dms = cda_dm_set(make_psk(L), CdaParams(M=2, t_phase=t, delta_phase=d, epsilon=eps, subset=sub))
    expect = L**3 if sub is None else L ** (4 - sub[0] * sub[1])
    assert dms.Q == expect
    assert power_errors(dms.matrices).max() < 1e-9


def test_cda_codeword_columns_rotate_t():
    p = CdaParams(M=3, t_phase=0.3, delta_phase=0.7)
    rng = np.random.default_rng(4)
    f = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    X = cda_codeword(p, f)
    w = cmath.exp(2j * math.pi / 3)
    for u in range(3):
        for k in range(3):
            z = sum(f[(u - k) % 3, i] * (w**k * p.t) ** i for i in range(3))
            assert X[u, k] == pytest.approx(z * (p.delta if u < k else 1))


def test_cda_pivot_validation(bpsk):
    assert cda_dm_set(bpsk, CdaParams(pivot=[1, 1])).Q == 8
    with pytest.raises(ValueError):
        cda_dm_set(bpsk, CdaParams(pivot=[0, 1]))
    with pytest.raises(ValueError):
        cda_dm_set(bpsk, CdaParams(pivot=2))
    with pytest.raises(ValueError):
        cda_dm_set(bpsk, CdaParams(subset=(3, 1)))


def test_structured_sets_need_psk():
    with pytest.raises(ValueError):
        fec_dm_set(make_square_qam(16))
    with pytest.raises(ValueError):
        cda_dm_set(make_square_qam(16))


def test_power_constraint_is_enforced():
    with pytest.raises(PowerConstraintError):
        DispersionMatrixSet(np.ones((2, 2, 2)), "CO")
    with pytest.raises(ValueError):
        DispersionMatrixSet(np.eye(2)[None, :, :1], "CO")  # M != T
    A = np.eye(2)[None] * (1 + 1e-12)
    assert DispersionMatrixSet(A, "CO").Q == 1


def test_take_and_base_order(qpsk):
    dms = fec_dm_set(make_psk(16))
    assert dms.take(3).Q == 3
    np.testing.assert_array_equal(dms.take(3).matrices, dms.matrices[:3])
    assert base_psk_order(16, 2, "FEC") == 16
    assert base_psk_order(64, 2, "CDA") == 4
    assert base_psk_order(8, 2, "CDA") == 2
    assert base_psk_order(5, 2, "cda") == 2


def test_fixture_power_within_print_precision():
    dms = co_fixture_bpsk8()
    assert dms.Q == 8 and dms.M == 2
    assert power_errors(dms.matrices).max() < 5e-3


def test_text_round_trip_is_exact(tmp_path, qpsk):
    for dms in (fec_dm_set(make_psk(8)), cda_dm_set(qpsk, t_phase=0.1, delta_phase=0.9), co_fixture_bpsk8()):
        path = tmp_path / "dms.txt"
        save_dm_set(dms, path)
        back = load_dm_set(path)
        np.testing.assert_array_equal(back.matrices, dms.matrices)
        assert back.family == dms.family
        assert format_dm_set(back) == format_dm_set(dms)


@pytest.mark.parametrize("text", ["", "2 2 2\n1 0\n0 1\n", "1 2 2 CO\n1 0\n", "1 2 2 CO\n2 0\n0 2\n"])
def test_parse_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_dm_set(text)


def test_co_search_is_deterministic_and_feasible(qpsk):
    a = co_dm_search(2, 2, 4, qpsk, candidates=5, mi_samples=300, rng_seed=7)
    b = co_dm_search(2, 2, 4, qpsk, candidates=5, mi_samples=300, rng_seed=7)
    np.testing.assert_array_equal(a.matrices, b.matrices)
    assert a.family == "CO" and a.Q == 4
    assert power_errors(a.matrices).max() < 1e-9
    assert 0 < a.params["mi"] <= 2.0
    c = co_dm_search(2, 2, 4, qpsk, candidates=5, mi_samples=300, rng_seed=8)
    assert not np.array_equal(a.matrices, c.matrices)
