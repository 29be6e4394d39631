import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from pnclab.channel import ChannelParams
from pnclab.detect import (SCHEMES, Thresholds, ber_analytic, ber_bpsk, ber_end_to_end, ber_monte_carlo,
                           ber_pnc_xor, ber_snc_xor, detect_xor, likelihood_ratio, optimal_thresholds,
                           pnc_threshold_comparison, q_func, snr_gap_db)


def test_q_func_basics():
    assert q_func(0) == 0.5
    for x in (0.5, 1, 2, 5):
        assert q_func(x) + q_func(-x) == pytest.approx(1.0, abs=1e-15)


def test_q_sqrt2_against_quadrature():
    tail, _ = quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), math.sqrt(2), math.inf, epsabs=1e-14)
    assert q_func(math.sqrt(2)) == pytest.approx(tail, rel=1e-10)
    assert q_func(math.sqrt(2)) == pytest.approx(0.07865, abs=1e-5)


@given(st.floats(-8, 8))
def test_q_relative_accuracy(x):
    exact = float(mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2)
    assert q_func(x) == pytest.approx(exact, rel=1e-12)


def test_q_vectorised():
    assert np.allclose(q_func(np.array([0.0, 1.0])), [0.5, q_func(1.0)])


def _lr_root(n0):
    # independent oracle: solve the likelihood-ratio fixed point directly
    f = lambda r: 2 * math.exp(-r * r / n0) - math.exp(-(r - 2) ** 2 / n0) - math.exp(-(r + 2) ** 2 / n0)
    return brentq(f, 1.0 + 1e-12, 2.0 + 5 * n0, xtol=1e-14)


@pytest.mark.parametrize("n0", [0.1, 0.5, 1.0, 2.0, 10.0])
def test_threshold_matches_root_find(n0):
    assert optimal_thresholds(n0).gamma2 == pytest.approx(_lr_root(n0), abs=1e-6)


def test_threshold_value_at_unit_n0():
    assert optimal_thresholds(1.0).gamma2 == pytest.approx(1.17327, abs=1e-5)


@pytest.mark.parametrize("n0", [0.1, 1.0, 10.0])
def test_fixed_point_and_symmetry(n0):
    t = optimal_thresholds(n0)
    assert t.gamma1 == -t.gamma2
    assert likelihood_ratio(t.gamma2, n0) == pytest.approx(1.0, abs=1e-9)


def test_threshold_limits_and_errors():
    assert optimal_thresholds(1e-6).gamma2 == pytest.approx(1.0, abs=1e-6)
    assert optimal_thresholds(1e6).gamma2 > 1.0
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            optimal_thresholds(bad)


def test_detect_xor_regions_and_tie():
    t = optimal_thresholds(1.0)
    assert detect_xor(0.0, t) == 1
    assert detect_xor(3.0, t) == 0 and detect_xor(-3.0, t) == 0
    assert detect_xor(t.gamma2, t) == 0 and detect_xor(t.gamma1, t) == 0
    assert list(detect_xor(np.array([-3.0, 0.0, 3.0]), t)) == [0, 1, 0]


def test_ber_examples():
    assert ber_bpsk(1.0) == pytest.approx(0.0786, abs=1e-4)
    assert ber_snc_xor(1.0) == pytest.approx(0.1449, abs=1e-4)
    assert ber_pnc_xor(1.0) == pytest.approx(0.109, abs=5e-4)
    for f in (ber_bpsk, ber_snc_xor, ber_pnc_xor):
        assert f(1e-4) < 1e-300 or f(1e-4) == 0.0


def _pnc_by_quadrature(n0):
    # the four Gaussian integrals, done numerically
    g = optimal_thresholds(n0).gamma2
    pdf = lambda r, m: math.exp(-(r - m) ** 2 / n0) / math.sqrt(math.pi * n0)
    kw = dict(epsabs=1e-12, epsrel=1e-12, limit=200)
    outer0 = quad(pdf, g, math.inf, args=(0,), **kw)[0] + quad(pdf, -math.inf, -g, args=(0,), **kw)[0]
    inner_p = quad(pdf, -g, g, args=(2,), **kw)[0]
    inner_m = quad(pdf, -g, g, args=(-2,), **kw)[0]
    return 0.5 * outer0 + 0.25 * inner_p + 0.25 * inner_m


@pytest.mark.parametrize("n0", [0.25, 1.0, 4.0])
def test_pnc_ber_against_quadrature(n0):
    assert ber_pnc_xor(n0) == pytest.approx(_pnc_by_quadrature(n0), abs=1e-10)


def test_ber_monotone_in_n0():
    grid = np.linspace(0.1, 10, 60)
    for f in (ber_bpsk, ber_snc_xor, ber_pnc_xor):
        v = [f(x) for x in grid]
        assert all(a < b for a, b in zip(v, v[1:]))


@given(st.floats(-2, 12))
def test_ber_ordering(snr_db):
    n0 = 10 ** (-snr_db / 10)
    assert ber_bpsk(n0) <= ber_pnc_xor(n0) <= ber_snc_xor(n0)


@given(st.floats(0.05, 20))
def test_optimal_threshold_minimises_analytic_ber(n0):
    g = optimal_thresholds(n0).gamma2
    b = ber_pnc_xor(n0)
    assert b <= ber_pnc_xor(n0, g * 1.01) + 1e-15
    assert b <= ber_pnc_xor(n0, g * 0.99) + 1e-15


def test_end_to_end():
    assert ber_end_to_end([0.01, 0.01]) == pytest.approx(0.02)
    assert ber_end_to_end([0]) == 0
    assert ber_end_to_end([0.03, 0]) == 0.03
    with pytest.raises(ValueError):
        ber_end_to_end([0.6])


def test_analytic_dispatch():
    assert ber_analytic("snc-xor", 1.0) == ber_snc_xor(1.0)
    with pytest.raises(ValueError):
        ber_analytic("qam", 1.0)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_monte_carlo_agrees(scheme):
    est = ber_monte_carlo(scheme, 1.0, 2_000_000, ChannelParams(1.0, 99), stream_index=3)
    assert abs(est.p_hat - ber_analytic(scheme, 1.0)) < 3 * est.std_err


@pytest.mark.parametrize("scheme", SCHEMES)
def test_monte_carlo_noiseless(scheme):
    assert ber_monte_carlo(scheme, 1e-6, 10_000, ChannelParams(1e-6, 1)).errors == 0


def test_monte_carlo_determinism_and_sharding():
    p = ChannelParams(1.0, 5)
    a = ber_monte_carlo("pnc-xor", 1.0, 50_000, p, workers=3)
    b = ber_monte_carlo("pnc-xor", 1.0, 50_000, p, workers=3)
    assert a == b
    assert a.std_err == pytest.approx(math.sqrt(a.p_hat * (1 - a.p_hat) / 50_000))


def test_monte_carlo_errors():
    p = ChannelParams(1.0)
    with pytest.raises(ValueError):
        ber_monte_carlo("bogus", 1.0, 10_000, p)
    with pytest.raises(ValueError):
        ber_monte_carlo("pnc-xor", 1.0, 9_999, p)


def test_paired_comparison_reference_is_zero():
    c = pnc_threshold_comparison(1.0, [1.17, 1.17 * 1.01], 200_000, ChannelParams(1.0, 2))
    assert c.diff(1.17) == 0 and c.diff_std_err(1.17) == 0
    assert c.diff_std_err(1.17 * 1.01) > 0


def test_snr_gap_oracle():
    shifted = lambda n0: ber_bpsk(n0 * 10 ** 0.05)  # same curve, 0.5 dB to the left
    assert snr_gap_db(ber_bpsk, ber_bpsk, 8.0) == pytest.approx(0, abs=1e-9)
    assert snr_gap_db(ber_bpsk, shifted, 8.0) == pytest.approx(0.5, abs=0.01)
