"""AWGN channels, seeded noise streams and the linear-chain SIR.

Per-bit received energy is fixed at 1, so an SNR of ``x`` dB means
``N0 = 10**(-x/10)`` and the real noise samples have variance ``N0/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def snr_db_to_n0(snr_db: float) -> float:
    return 10.0 ** (-snr_db / 10.0)


def n0_to_snr_db(n0: float) -> float:
    return -10.0 * math.log10(n0)


@dataclass(frozen=True)
class ChannelParams:
    n0: float
    seed: int = 0

    def __post_init__(self):
        if not self.n0 > 0:
            raise ValueError(f"noise density N0 must be positive, got {self.n0!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.n0 / 2.0)

    @classmethod
    def from_snr_db(cls, snr_db: float, seed: int = 0) -> "ChannelParams":
        return cls(snr_db_to_n0(snr_db), seed)


class NoiseStream:
    """Deterministic standard-normal source keyed by ``(seed, stream_index)``.

    The stream index may be an int or a tuple of ints (e.g. grid point,
    scheme, shard); each distinct key gives an independent stream via
    :class:`numpy.random.SeedSequence` spawn keys.
    """

    def __init__(self, seed: int, stream_index: int | Sequence[int] = 0):
        key = (stream_index,) if isinstance(stream_index, (int, np.integer)) else tuple(stream_index)
        self.seed = int(seed)
        self.stream_index = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream_index)
        self.rng = np.random.Generator(np.random.PCG64(ss))

    def normal(self, size=None, scale: float = 1.0):
        return self.rng.standard_normal(size) * scale

    def bits(self, size) -> np.ndarray:
        return self.rng.integers(0, 2, size=size, dtype=np.int8)


def p2p_awgn(a, params: ChannelParams, noise: NoiseStream):
    """``r = a + n`` with ``n ~ N(0, N0/2)``; ``a`` may be a scalar or array."""
    a = np.asarray(a, dtype=float)
    r = a + noise.normal(a.shape, params.sigma)
    return float(r) if r.ndim == 0 else r


def superpose_awgn(a1, a3, params: ChannelParams, noise: NoiseStream):
    """Synchronous two-source reception ``r = a1 + a3 + n``."""
    return p2p_awgn(np.asarray(a1, dtype=float) + np.asarray(a3, dtype=float), params, noise)


def chain_interference_sum(alpha: float, tolerance: float = 1e-12) -> float:
    """``sum_{l>=1} (2l+1)**-alpha``, truncated once a term falls below ``tolerance * partial``."""
    if not alpha > 2:
        raise ValueError(f"interference series diverges for path-loss exponent {alpha} <= 2")
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    total = 0.0
    l = 1
    while True:
        term = (2 * l + 1) ** -alpha
        total += term
        if (2 * l + 3) ** -alpha < tolerance * total:
            return total
        l += 1


def chain_sir_db(alpha: float, tolerance: float = 1e-12) -> float:
    """SIR of a PNC chain receiver whose nearest interferers are three hops away.

    Distances cancel, so only the path-loss exponent matters.  Series
    convergence is slow for ``alpha`` near 2 (term count grows like
    ``tolerance**(-1/(alpha-1))``).
    """
    return 10.0 * math.log10(1.0 / (2.0 * chain_interference_sum(alpha, tolerance)))
