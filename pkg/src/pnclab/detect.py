"""MAP thresholds, analytic BERs and Monte Carlo BER estimation.

All BER expressions are for one real (in-phase) BPSK dimension with unit
received energy per bit and noise variance ``N0/2``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erfc, ndtr

from .channel import ChannelParams, NoiseStream

SCHEMES = ("traditional-hop", "snc-xor", "pnc-xor")
MIN_TRIALS = 10_000
CHUNK = 1 << 20


def q_func(x):
    """Standard Gaussian tail probability ``P(Z > x)``."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def _check_n0(n0: float) -> None:
    if not n0 > 0:
        raise ValueError(f"noise density N0 must be positive, got {n0!r}")


@dataclass(frozen=True)
class Thresholds:
    gamma1: float
    gamma2: float


def optimal_thresholds(n0: float) -> Thresholds:
    """MAP thresholds separating ``a1+a3 = 0`` from ``a1+a3 = +-2``."""
    _check_n0(n0)
    # -expm1(-x) keeps 1 - e^{-8/N0} accurate when N0 is large
    g2 = 1.0 + n0 / 4.0 * math.log1p(math.sqrt(-math.expm1(-8.0 / n0)))
    return Thresholds(-g2, g2)


def likelihood_ratio(r: float, n0: float) -> float:
    """Posterior odds of ``a1+a3 = 0`` against ``a1+a3 != 0`` given ``r``.

    Evaluated in the log domain so it stays finite for small ``N0``.
    """
    _check_n0(n0)
    lo = -(r * r) / n0
    hi = np.logaddexp(-((r - 2.0) ** 2) / n0, -((r + 2.0) ** 2) / n0)
    return float(2.0 * math.exp(lo - hi))


def detect_xor(r, thr: Thresholds):
    """1 when ``gamma1 < r < gamma2`` (sum judged zero), else 0.

    A sample exactly on a threshold goes to the outer region.
    """
    r = np.asarray(r)
    out = ((r > thr.gamma1) & (r < thr.gamma2)).astype(np.int8)
    return int(out) if out.ndim == 0 else out


def ber_bpsk(n0: float) -> float:
    _check_n0(n0)
    return q_func(math.sqrt(2.0 / n0))


def ber_snc_xor(n0: float) -> float:
    p = ber_bpsk(n0)
    return 2.0 * p * (1.0 - p)


def _pnc_terms(n0: float, gamma2: float) -> tuple[float, float]:
    """(P(outer | sum 0) per side, P(inner | sum +-2)) for a threshold ``gamma2``."""
    s = math.sqrt(2.0 / n0)
    outer = q_func(gamma2 * s)
    inner = float(ndtr((gamma2 - 2.0) * s) - ndtr((-gamma2 - 2.0) * s))
    return outer, inner


def ber_pnc_xor(n0: float, gamma2: float | None = None) -> float:
    """XOR-bit error rate of PNC reception at the relay.

    The four Gaussian integrals reduce to two Q-function terms: the zero sum
    (probability 1/2) leaks past either threshold, and each +-2 sum
    (probability 1/4) leaks into the inner region.
    """
    _check_n0(n0)
    if gamma2 is None:
        gamma2 = optimal_thresholds(n0).gamma2
    outer, inner = _pnc_terms(n0, gamma2)
    return 0.5 * (2.0 * outer) + 0.5 * inner


def ber_end_to_end(per_hop: Sequence[float]) -> float:
    """Small-BER approximation: per-hop error rates add."""
    for p in per_hop:
        if not 0 <= p < 0.5:
            raise ValueError(f"per-hop BER must be in [0, 0.5), got {p!r}")
    return float(sum(per_hop))


def ber_analytic(scheme: str, n0: float) -> float:
    try:
        fn = {"traditional-hop": ber_bpsk, "snc-xor": ber_snc_xor, "pnc-xor": ber_pnc_xor}[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}") from None
    return fn(n0)


@dataclass(frozen=True)
class BerEstimate:
    errors: int
    trials: int

    @property
    def p_hat(self) -> float:
        return self.errors / self.trials

    @property
    def std_err(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.trials)


def _count_errors(scheme: str, n0: float, trials: int, noise: NoiseStream) -> int:
    sigma = math.sqrt(n0 / 2.0)
    thr = optimal_thresholds(n0) if scheme == "pnc-xor" else None
    errors = 0
    left = trials
    while left:
        m = min(left, CHUNK)
        left -= m
        if scheme == "traditional-hop":
            s = noise.bits(m)
            r = (2 * s - 1) + noise.normal(m, sigma)
            errors += int(np.count_nonzero((r > 0) != (s == 1)))
        elif scheme == "snc-xor":
            s1, s3 = noise.bits(m), noise.bits(m)
            d1 = ((2 * s1 - 1) + noise.normal(m, sigma)) > 0
            d3 = ((2 * s3 - 1) + noise.normal(m, sigma)) > 0
            errors += int(np.count_nonzero((d1 ^ d3) != (s1 ^ s3).astype(bool)))
        else:
            s1, s3 = noise.bits(m), noise.bits(m)
            r = (2 * s1 + 2 * s3 - 2) + noise.normal(m, sigma)
            errors += int(np.count_nonzero(detect_xor(r, thr) != (s1 ^ s3)))
    return errors


def ber_monte_carlo(scheme: str, n0: float, trials: int, params: ChannelParams,
                    stream_index: int | Sequence[int] = 0, workers: int = 1) -> BerEstimate:
    """Simulated hard-decision BER for one reception scheme.

    ``traditional-hop`` is a single BPSK hop, ``snc-xor`` XORs hard decisions
    from two independent hops, ``pnc-xor`` thresholds a synchronous
    superposition.  Trials are split into ``workers`` shards, shard ``k``
    drawing from stream ``(*stream_index, k)``; the count depends only on
    ``(seed, stream_index, trials, workers)``.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    _check_n0(n0)
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be >= {MIN_TRIALS}, got {trials}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    base = (stream_index,) if isinstance(stream_index, (int, np.integer)) else tuple(stream_index)
    shares = [trials // workers + (k < trials % workers) for k in range(workers)]

    def shard(k: int) -> int:
        return _count_errors(scheme, n0, shares[k], NoiseStream(params.seed, (*base, k)))

    if workers == 1:
        errors = shard(0)
    else:
        with ThreadPoolExecutor(workers) as pool:
            errors = sum(pool.map(shard, range(workers)))
    return BerEstimate(errors, trials)


@dataclass(frozen=True)
class PairedComparison:
    """Error counts of several thresholds applied to the same received samples."""

    trials: int
    errors: dict[float, int]
    # per-threshold: sum over trials of (err_t - err_ref)^2
    sq_diffs: dict[float, int]
    reference: float

    def diff(self, gamma2: float) -> float:
        return (self.errors[gamma2] - self.errors[self.reference]) / self.trials

    def diff_std_err(self, gamma2: float) -> float:
        n = self.trials
        d = self.diff(gamma2)
        return math.sqrt(max(self.sq_diffs[gamma2] / n - d * d, 0.0) / n)


def pnc_threshold_comparison(n0: float, gammas: Sequence[float], trials: int,
                             params: ChannelParams, stream_index=0) -> PairedComparison:
    """PNC XOR-bit errors for several upper thresholds on common noise.

    The first entry of ``gammas`` is the reference.  Reusing one set of
    samples across thresholds removes the between-run noise from the
    differences, whose standard errors are reported separately.
    """
    _check_n0(n0)
    noise = NoiseStream(params.seed, stream_index)
    sigma = math.sqrt(n0 / 2.0)
    errors = {g: 0 for g in gammas}
    sq = {g: 0 for g in gammas}
    ref = gammas[0]
    left = trials
    while left:
        m = min(left, CHUNK)
        left -= m
        s1, s3 = noise.bits(m), noise.bits(m)
        truth = (s1 ^ s3).astype(bool)
        r = (2 * s1 + 2 * s3 - 2) + noise.normal(m, sigma)
        ar = np.abs(r)
        wrong = {g: (ar < g) != truth for g in gammas}
        for g in gammas:
            errors[g] += int(np.count_nonzero(wrong[g]))
            sq[g] += int(np.count_nonzero(wrong[g] != wrong[ref]))
    return PairedComparison(trials, errors, sq, ref)


def snr_gap_db(ber_a, ber_b, snr_db: float, grid_step: float = 0.01, span: float = 3.0) -> float:
    """Horizontal distance in dB between two BER curves at equal BER.

    Takes curve ``a`` at ``snr_db`` and finds where curve ``b`` reaches the
    same BER by linear interpolation of ``log(BER)`` on a ``grid_step`` grid.
    ``ber_a``/``ber_b`` map N0 to BER.
    """
    target = math.log(ber_a(10 ** (-snr_db / 10)))
    grid = np.arange(snr_db - span, snr_db + span + grid_step / 2, grid_step)
    vals = np.log([ber_b(10 ** (-x / 10)) for x in grid])
    # BER decreases with SNR; flip for np.interp
    x = float(np.interp(-target, -vals, grid))
    return abs(x - snr_db)
