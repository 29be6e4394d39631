"""SNR penalties from imperfect carrier-phase, carrier-frequency and symbol-time sync.

Each model compares the received amplitude of the superposed pair against
the perfectly synchronised case.  Phase and frequency offsets only shrink
the wanted amplitude; a time offset also leaks raised-cosine tails from
neighbouring symbols (ISI), so that case is an SINR penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

DEFAULT_ISI_SPAN = 64


@dataclass(frozen=True)
class SyncOffsets:
    theta: float = 0.0  # carrier-phase offset, radians
    df_t: float = 0.0  # half the carrier-frequency offset times the symbol period
    dt_frac: float = 0.0  # time offset as a fraction of the symbol period
    beta: float = 0.5  # raised-cosine roll-off

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_phase(self.theta))
        if self.df_t < 0:
            raise ValueError("df_t must be non-negative")
        if abs(self.dt_frac) > 0.5:
            raise ValueError("dt_frac must lie in [-0.5, 0.5]")
        if not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")


@dataclass(frozen=True)
class PenaltyResult:
    penalty_db: float
    desired_power: float
    isi_variance: float = 0.0
    noise_variance: float = 0.0


def normalize_phase(theta: float) -> float:
    """Fold ``theta`` into [-pi/2, pi/2).

    A shift by pi is the same as negating the second transmitter's symbol,
    which a PNC receiver absorbs by relabelling, so only theta mod pi matters.
    """
    if not math.isfinite(theta):
        raise ValueError(f"phase offset must be finite, got {theta!r}")
    t = (theta + math.pi / 2) % math.pi - math.pi / 2
    # float round-off can land exactly on the open end
    return -math.pi / 2 if t >= math.pi / 2 else t


def phase_power_factor(theta: float) -> float:
    return math.cos(normalize_phase(theta) / 2.0) ** 2


def phase_penalty_db(theta: float) -> float:
    """Penalty when the receiver mixes at the mid-phase ``theta/2``."""
    return 10.0 * math.log10(phase_power_factor(theta))


def phase_penalty_avg_db() -> float:
    """Penalty of the linear power factor averaged over a uniform phase."""
    return 10.0 * math.log10(1.0 / math.pi + 0.5)


def freq_power_factor(df_t: float) -> float:
    if df_t < 0 or df_t > 0.25:
        raise ValueError(f"df_t={df_t!r} outside the small-offset model range [0, 0.25]")
    x = 2.0 * df_t
    return float(np.sinc(x)) ** 2  # sin(2 pi dfT) / (2 pi dfT)


def freq_penalty_db(df_t: float) -> float:
    return 10.0 * math.log10(freq_power_factor(df_t))


def raised_cosine(t_frac, beta: float):
    """Raised-cosine pulse at ``t/T``; the removable singularities at ``|t| = T/(2 beta)`` use their limit."""
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    t = np.asarray(t_frac, dtype=float)
    denom = 1.0 - (2.0 * beta * t) ** 2
    singular = np.abs(denom) < 1e-12
    safe = np.where(singular, 0.0, t)
    val = np.sinc(safe) * np.cos(np.pi * beta * safe) / np.where(singular, 1.0, denom)
    limit = np.pi / 4.0 * np.sinc(1.0 / (2.0 * beta))
    out = np.where(singular, limit, val)
    return float(out) if out.ndim == 0 else out


def isi_variance(dt_frac: float, beta: float, isi_span: int = DEFAULT_ISI_SPAN) -> float:
    """ISI power at the mid-offset sampling instant.

    Independent zero-mean unit-power symbols from both transmitters, each
    entering with amplitude 1/2, so cross terms vanish in expectation.
    """
    m = np.arange(1, isi_span + 1, dtype=float)
    m = np.concatenate([-m[::-1], m])
    h = dt_frac / 2.0
    return float(0.25 * np.sum(raised_cosine(m + h, beta) ** 2 + raised_cosine(m - h, beta) ** 2))


def time_penalty_db(dt_frac: float, beta: float = 0.5, snr0_db: float = 10.0,
                    isi_span: int = DEFAULT_ISI_SPAN) -> PenaltyResult:
    """SINR penalty of a symbol-time offset ``dt_frac = dt/T``.

    The wanted power is ``p(dt/2)**2`` relative to a perfectly aligned
    pulse, and the noise variance is ``10**(-snr0_db/10)`` on that same
    scale, i.e. ``snr0_db`` is the SNR with no offset.
    """
    if abs(dt_frac) > 0.5:
        raise ValueError("dt_frac must lie in [-0.5, 0.5]")
    if isi_span < 16:
        raise ValueError("isi_span must be >= 16")
    desired = raised_cosine(dt_frac / 2.0, beta) ** 2
    isi = isi_variance(dt_frac, beta, isi_span)
    sn2 = 10.0 ** (-snr0_db / 10.0)
    pen = 10.0 * math.log10(desired) - 10.0 * math.log10((isi + sn2) / sn2)
    return PenaltyResult(pen, desired, isi, sn2)


def time_penalty_curve(beta: float = 0.5, snr0_db: float = 10.0, points: int = 1001,
                       isi_span: int = DEFAULT_ISI_SPAN) -> tuple[np.ndarray, np.ndarray]:
    grid = np.linspace(-0.5, 0.5, points)
    return grid, np.array([time_penalty_db(x, beta, snr0_db, isi_span).penalty_db for x in grid])


def time_penalty_worst_db(beta: float = 0.5, snr0_db: float = 10.0, points: int = 1001) -> float:
    return float(time_penalty_curve(beta, snr0_db, points)[1].min())


def time_penalty_avg_db(beta: float = 0.5, snr0_db: float = 10.0,
                        isi_span: int = DEFAULT_ISI_SPAN) -> float:
    """dB-domain penalty averaged over a time offset uniform on [-T/2, T/2]."""
    val, _ = quad(lambda x: time_penalty_db(x, beta, snr0_db, isi_span).penalty_db,
                  -0.5, 0.5, points=[0.0], limit=200)
    return float(val)


def simulate_phase_penalty_db(theta: float, symbols: int = 100_000, samples_per_symbol: int = 32,
                              cycles_per_symbol: int = 4, noise_std: float = 0.5,
                              seed: int = 0) -> float:
    """Waveform-level estimate of the phase penalty.

    Two BPSK carriers offset by ``theta`` are summed sample by sample with
    white noise, and the receiver correlates each symbol against a carrier
    at ``theta/2`` (midpoint-rule integral).  The penalty is the squared
    least-squares gain of the correlator output on the ideal ``(a1+a2) T/2``.
    """
    rng = np.random.default_rng(seed)
    a1 = rng.choice([-1.0, 1.0], symbols)
    a2 = rng.choice([-1.0, 1.0], symbols)
    T = 1.0
    dt = T / samples_per_symbol
    f = cycles_per_symbol / T
    # absolute time of every sample, symbol-major
    t = (np.arange(symbols)[:, None] * samples_per_symbol + np.arange(samples_per_symbol) + 0.5) * dt
    wave = (a1[:, None] * np.cos(2 * np.pi * f * t)
            + a2[:, None] * np.cos(2 * np.pi * f * t + theta)
            + rng.normal(0.0, noise_std, t.shape))
    r = np.sum(wave * np.cos(2 * np.pi * f * t + theta / 2), axis=1) * dt
    ideal = (a1 + a2) * T / 2
    gain = float(np.dot(r, ideal) / np.dot(ideal, ideal))
    return 10.0 * math.log10(gain ** 2)
