from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncklab import matcore
from ncklab.errors import MajorizationViolated
from ncklab.profile import Profile, weak_lp
from ncklab.rowcol import GModel, col_gram, g_profile, row_gram
from ncklab.schurhorn import (MajorizationPair, build_x, chan_li, chan_li_errors, divisor_sum,
                              family1, family1_pair, family2, family2_pair, harmonic, sweep)


def random_pair(rng, n):
    # diag = D lam with D doubly stochastic (a convex mix of permutations) is majorised by lam
    lam = np.sort(rng.exponential(size=n))[::-1]
    w = rng.dirichlet(np.ones(4))
    diag = sum(wk * lam[rng.permutation(n)] for wk in w)
    return MajorizationPair(lam, diag)


def _check(M, pair):
    sc = pair.lam[0]
    assert np.allclose(M, M.T, atol=0)
    assert np.max(np.abs(np.diag(M) - pair.diag)) <= 1e-10 * sc
    ev = np.sort(np.linalg.eigvalsh(M))[::-1]
    assert np.max(np.abs(ev - pair.lam)) <= 1e-8 * sc


def test_pair_padding_and_sorting():
    p = MajorizationPair([1, 3], [2, 1, 1])
    assert list(p.lam) == [3, 1, 0] and list(p.diag) == [2, 1, 1]
    assert p.is_majorized()
    assert not MajorizationPair([2, 2], [3, 1]).is_majorized()
    with pytest.raises(ValueError):
        MajorizationPair([-1], [1])


def test_chan_li_two_by_two():
    M = chan_li(MajorizationPair([3, 1], [2, 2]))
    assert np.allclose(M, [[2, 1], [1, 2]], atol=1e-15)


def test_chan_li_already_diagonal():
    lam = [5.0, 3.0, 1.0]
    M = chan_li(MajorizationPair(lam, lam))
    assert np.array_equal(M, np.diag(lam))


def test_chan_li_unsorted_diag_order():
    M = chan_li(MajorizationPair([4, 2, 0], [1, 3, 2]))
    assert np.allclose(np.diag(M), [1, 3, 2], atol=1e-14)


def test_chan_li_rank_one_h4():
    pair = family1_pair(4)
    assert pair.lam[0] == pytest.approx(25 / 12)
    M = chan_li(pair)
    c = np.sqrt(np.abs(np.diag(M)))
    assert np.allclose(c ** 2, [1, 1 / 2, 1 / 3, 1 / 4], atol=1e-15)
    assert np.allclose(np.abs(M), np.outer(c, c), atol=1e-14)
    assert np.linalg.matrix_rank(M, tol=1e-12) == 1


def test_chan_li_rejects():
    with pytest.raises(MajorizationViolated):
        chan_li(MajorizationPair([2, 2], [3, 1]))


@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_chan_li_random(n, seed):
    pair = random_pair(np.random.default_rng(seed), n)
    M = chan_li(pair)
    _check(M, pair)
    err = chan_li_errors(M, pair)
    assert err["verified"] and err["trace_error"] <= 1e-12 and err["frobenius_error"] <= 1e-12


def test_chan_li_errors_unverified_above_cap():
    pair = family1_pair(20)
    err = chan_li_errors(chan_li(pair), pair, verify_cap=10)
    assert not err["verified"] and err["spectrum_error"] is None


# --- build_x --------------------------------------------------------------

def test_build_x_identity():
    x = build_x(np.eye(2))
    assert np.allclose(x.items[0], [[1, 0], [0, 0]]) and np.allclose(x.items[1], [[0, 0], [0, 1]])


def test_build_x_grams():
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    x = build_x(M)
    assert np.allclose(col_gram(x), M, atol=1e-10)
    assert np.allclose(row_gram(x), np.diag(np.diag(M)), atol=1e-10)
    # cross terms x_i^* x_j vanish for i != j
    assert np.allclose(x.items[0].conj().T @ x.items[1], 0)


def test_build_x_gx_profile():
    M = chan_li(family1_pair(4))
    x = build_x(M)
    g = g_profile(x, GModel())
    ref = Profile.from_arrays(np.sqrt(np.clip(np.linalg.eigvalsh(M), 0, None)), 1.0)
    assert g.allclose(ref, rtol=1e-7, atol=1e-7)


# --- families ---------------------------------------------------------------

def test_harmonic_and_divisor_sums():
    assert Fraction(harmonic(4)).limit_denominator(100) == Fraction(25, 12)
    assert divisor_sum(4) == 8
    assert [divisor_sum(n) for n in range(1, 11)] == [1, 3, 5, 8, 10, 14, 16, 20, 23, 27]


def test_family1_small():
    r = family1(1)
    assert (r.g_weak2, r.r_weak2, r.ratio) == pytest.approx((1.0, 1.0, 1.0))
    r = family1(4)
    assert r.g_weak2 == pytest.approx(np.sqrt(25 / 12), rel=1e-12)
    assert r.r_weak2 == pytest.approx(1.0, rel=1e-12)
    assert r.c_weak2 == r.g_weak2 and r.verified


def test_family2_small():
    r = family2(1)
    assert (r.g_weak2, r.r_weak2) == pytest.approx((1.0, 1.0))
    r = family2(4)
    assert r.size == 8
    assert r.g_weak2 == pytest.approx(2.0, rel=1e-12)
    assert r.r_weak2 == pytest.approx(np.sqrt(8), rel=1e-12)


@pytest.mark.parametrize("N", [3, 10, 25])
def test_family2_growth_identity(N):
    r = family2(N)
    assert r.ratio ** 2 * N == pytest.approx(divisor_sum(N), rel=1e-12)


def test_family1_log_growth():
    # ratio^2 = H_N = ln N + gamma + O(1/N)
    r = family1(512)
    assert r.ratio ** 2 - np.log(512) == pytest.approx(np.euler_gamma, abs=1e-3)


def test_gx_weak_norm_matches_rademacher_enumeration():
    # the vanishing cross terms make mu(Gx) = mu(M^1/2) for Rademacher signs
    M = chan_li(family2_pair(3))
    x = build_x(M)
    g = weak_lp(g_profile(x, GModel()), 2)
    assert g == pytest.approx(np.sqrt(3), rel=1e-9)


def test_sweep_rows():
    rows = [r.row() for r in sweep(1, [2, 8])]
    assert [r["N"] for r in rows] == [2, 8] and all(r["family"] == 1 for r in rows)
    assert set(rows[0]) >= {"N", "g_weak2", "r_weak2", "c_weak2", "ratio", "verified"}


def test_unverified_report_above_cap():
    r = family1(64, verify_cap=16)
    assert not r.verified and r.spectrum_error is None
    assert r.g_weak2 == pytest.approx(np.sqrt(harmonic(64)), rel=1e-12)
