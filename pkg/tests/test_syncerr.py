import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from pnclab.syncerr import (SyncOffsets, freq_penalty_db, isi_variance, normalize_phase, phase_penalty_avg_db,
                            phase_penalty_db, raised_cosine, simulate_phase_penalty_db, time_penalty_avg_db,
                            time_penalty_curve, time_penalty_db, time_penalty_worst_db)


def test_phase_examples():
    assert phase_penalty_db(0.0) == 0.0
    assert phase_penalty_db(math.pi / 2) == pytest.approx(-3.0103, abs=1e-4)
    assert phase_penalty_db(-math.pi / 4) == phase_penalty_db(math.pi / 4)


@given(st.floats(-20, 20))
def test_phase_folding(theta):
    t = normalize_phase(theta)
    assert -math.pi / 2 <= t < math.pi / 2
    assert phase_penalty_db(theta) == pytest.approx(phase_penalty_db(theta + math.pi), abs=1e-9)
    assert phase_penalty_db(theta) <= 0


def test_phase_nonfinite():
    with pytest.raises(ValueError):
        phase_penalty_db(math.inf)


def test_phase_average_against_quadrature():
    val, _ = quad(lambda t: math.cos(t / 2) ** 2 / math.pi, -math.pi / 2, math.pi / 2, epsabs=1e-13)
    assert phase_penalty_avg_db() == pytest.approx(10 * math.log10(val), abs=1e-10)
    assert -1 < phase_penalty_avg_db() < 0


def test_phase_grid_even_and_monotone():
    g = np.linspace(0, math.pi / 2, 1001, endpoint=False)
    v = np.array([phase_penalty_db(x) for x in g])
    assert np.all(np.diff(v) < 0)
    assert np.allclose(v, [phase_penalty_db(-x) for x in g])


def test_freq_examples():
    assert freq_penalty_db(0.0) == 0.0
    assert freq_penalty_db(0.1) == pytest.approx(-0.5792, abs=1e-4)
    g = np.linspace(0, 0.1, 1001)
    v = np.array([freq_penalty_db(x) for x in g])
    assert np.all(np.diff(v) < 0) and v.min() > -0.6
    # direct sin^2(x)/x^2 evaluation
    x = 2 * math.pi * 0.07
    assert freq_penalty_db(0.07) == pytest.approx(10 * math.log10(math.sin(x) ** 2 / x**2), abs=1e-12)
    for bad in (-0.01, 0.3):
        with pytest.raises(ValueError):
            freq_penalty_db(bad)


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0])
def test_raised_cosine_nyquist(beta):
    assert raised_cosine(0.0, beta) == 1.0
    for k in (1, 2, 3, -4):
        assert raised_cosine(float(k), beta) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("beta", [0.5, 1.0, 0.25])
def test_raised_cosine_singularity_continuity(beta):
    t0 = 1 / (2 * beta)
    v = raised_cosine(t0, beta)
    for t in (t0 - 1e-7, t0 + 1e-7):
        assert raised_cosine(t, beta) == pytest.approx(v, abs=1e-5)


def test_raised_cosine_rejects_beta():
    with pytest.raises(ValueError):
        raised_cosine(0.1, 0.0)


def test_time_zero_offset():
    r = time_penalty_db(0.0, 0.5, 10.0)
    assert r.penalty_db == pytest.approx(0, abs=1e-12)
    assert r.isi_variance == pytest.approx(0, abs=1e-20)


def test_time_span_stability():
    for dt in np.linspace(-0.5, 0.5, 41):
        a = time_penalty_db(dt, 0.5, 10.0, 64).penalty_db
        b = time_penalty_db(dt, 0.5, 10.0, 256).penalty_db
        assert abs(a - b) < 0.01


def test_isi_oracle_loop():
    # plain double loop over neighbour offsets
    dt, beta, span = 0.3, 0.5, 40
    acc = 0.0
    for m in range(-span, span + 1):
        if m == 0:
            continue
        acc += 0.25 * (raised_cosine(m + dt / 2, beta) ** 2 + raised_cosine(m - dt / 2, beta) ** 2)
    assert isi_variance(dt, beta, span) == pytest.approx(acc, rel=1e-12)


def test_time_properties():
    grid, vals = time_penalty_curve(0.5, 10.0, 201)
    assert np.all(vals <= 1e-12)
    assert np.allclose(vals, vals[::-1])
    worst = time_penalty_worst_db(0.5, 10.0)
    avg = time_penalty_avg_db(0.5, 10.0)
    assert avg >= worst
    assert -3 <= avg <= 0


def test_time_average_shrinks_with_lower_snr0():
    a0, a10, a20 = (abs(time_penalty_avg_db(0.5, s)) for s in (0, 10, 20))
    assert a0 < a10 < a20


def test_time_preconditions():
    with pytest.raises(ValueError):
        time_penalty_db(0.6)
    with pytest.raises(ValueError):
        time_penalty_db(0.1, isi_span=8)


def test_offsets_container():
    o = SyncOffsets(theta=math.pi, df_t=0.05, dt_frac=0.25)
    assert o.theta == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        SyncOffsets(dt_frac=0.7)


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 3])
def test_waveform_simulation(theta):
    assert simulate_phase_penalty_db(theta) == pytest.approx(phase_penalty_db(theta), abs=0.05)
