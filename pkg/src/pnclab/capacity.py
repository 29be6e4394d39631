"""Capacity per transmission cycle for the two-way relay channel.

Traditional relaying spends four BSC slots per exchange, straightforward
network coding three.  PNC spends one multiple-access slot and one
broadcast slot; the multiple-access part has no known capacity, so an
upper bound (hard-decision ternary channel, scaled by the information kept
after XOR mapping) and a lower bound (virtual binary channel achievable
with a linear code) are computed.  Entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtr

from .channel import snr_db_to_n0
from .detect import ber_bpsk, optimal_thresholds, q_func


def entropy(probs: Sequence[float]) -> float:
    """Entropy of ``probs`` completed by the remainder ``1 - sum(probs)``.

    ``entropy([p])`` is the binary entropy, ``entropy([p, q])`` the ternary
    H(p, q).  Uses 0 log 0 = 0.
    """
    ps = [float(p) for p in probs]
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p!r} outside [0, 1]")
    rest = 1.0 - math.fsum(ps)
    if rest < -1e-12:
        raise ValueError(f"probabilities sum to {1 - rest!r} > 1")
    ps.append(max(rest, 0.0))
    return -math.fsum(p * math.log2(p) for p in ps if p > 0.0)


@dataclass(frozen=True)
class CrossoverProbs:
    p1: float  # sum 0 decided as +2 (and, equally, as -2)
    p2: float  # sum +-2 decided as 0
    p3: float  # sum +-2 decided as the opposite sign

    def __post_init__(self):
        for p in (self.p1, self.p2, self.p3):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"crossover probability {p!r} outside [0, 1]")


def crossover_probs(n0: float) -> CrossoverProbs:
    g2 = optimal_thresholds(n0).gamma2
    s = math.sqrt(2.0 / n0)
    p1 = q_func(g2 * s)
    # single expression covering both gamma2 > 2 and 1 < gamma2 <= 2
    p2 = float(ndtr((g2 - 2.0) * s) - ndtr((-g2 - 2.0) * s))
    p3 = q_func((g2 + 2.0) * s)
    return CrossoverProbs(p1, p2, p3)


def crossover_p2_two_branch(n0: float) -> float:
    """``p2`` in its two-case form, kept separate to cross-check the single expression."""
    g2 = optimal_thresholds(n0).gamma2
    s = math.sqrt(2.0 / n0)
    if g2 > 2.0:
        return 1.0 - q_func((g2 - 2.0) * s) - q_func((g2 + 2.0) * s)
    return q_func((2.0 - g2) * s) - q_func((g2 + 2.0) * s)


def bsc_capacity(p: float) -> float:
    return 1.0 - entropy([p])


def cap_traditional(n0: float) -> float:
    return bsc_capacity(ber_bpsk(n0)) / 4.0


def cap_snc(n0: float) -> float:
    return bsc_capacity(ber_bpsk(n0)) / 3.0


def _harmonic(cm: float, cb: float) -> float:
    if cm <= 0.0 or cb <= 0.0:
        return 0.0
    return 1.0 / (1.0 / cm + 1.0 / cb)


def ma_mutual_info_upper(cp: CrossoverProbs) -> float:
    """I(a1+a3; hard decision): output entropy minus mean conditional entropy."""
    q = 1.0 - cp.p2 + 2.0 * cp.p1
    return entropy([q / 4, q / 4]) - 0.5 * (entropy([cp.p2, cp.p3]) + entropy([cp.p1, cp.p1]))


def ma_capacity_upper(cp: CrossoverProbs) -> float:
    """Upper bound on the PNC multiple-access capacity (closed form)."""
    q = 1.0 - cp.p2 + 2.0 * cp.p1
    h_out = entropy([q / 4, q / 4])
    if h_out == 0.0:
        return 0.0
    return entropy([q / 2]) * (1.0 - (entropy([cp.p2, cp.p3]) + entropy([cp.p1, cp.p1])) / (2.0 * h_out))


def ma_capacity_upper_product(cp: CrossoverProbs) -> float:
    """Same bound as ``C' * H(s2) / H(a_hat)``; used to guard the closed form."""
    q = 1.0 - cp.p2 + 2.0 * cp.p1
    h_out = entropy([q / 4, q / 4])
    if h_out == 0.0:
        return 0.0
    return ma_mutual_info_upper(cp) * entropy([q / 2]) / h_out


def ma_capacity_lower(cp: CrossoverProbs) -> float:
    """Mutual information of the virtual XOR-bit channel with uniform input."""
    return (entropy([(1.0 - 2.0 * cp.p1 + cp.p2) / 2.0])
            - entropy([2.0 * cp.p1]) / 2.0 - entropy([cp.p2]) / 2.0)


def cap_pnc_upper(n0: float) -> float:
    cb = bsc_capacity(ber_bpsk(n0))
    return _harmonic(ma_capacity_upper(crossover_probs(n0)), cb)


def cap_pnc_lower(n0: float) -> float:
    """Lower bound; a non-positive multiple-access term yields 0."""
    cb = bsc_capacity(ber_bpsk(n0))
    return _harmonic(ma_capacity_lower(crossover_probs(n0)), cb)


@dataclass(frozen=True)
class CapacityReport:
    snr_db: float
    c_traditional: float
    c_snc: float
    c_pnc_upper: float
    c_pnc_lower: float

    @property
    def gain_upper(self) -> float:
        return self.c_pnc_upper / self.c_traditional

    @property
    def gain_lower(self) -> float:
        return self.c_pnc_lower / self.c_traditional

    @property
    def gain_snc(self) -> float:
        return self.c_snc / self.c_traditional


def capacity_report(snr_db: float) -> CapacityReport:
    n0 = snr_db_to_n0(snr_db)
    return CapacityReport(
        snr_db=float(snr_db),
        c_traditional=cap_traditional(n0),
        c_snc=cap_snc(n0),
        c_pnc_upper=cap_pnc_upper(n0),
        c_pnc_lower=cap_pnc_lower(n0),
    )


def gain_table(snr_db_list: Iterable[float]) -> list[CapacityReport]:
    return [capacity_report(s) for s in snr_db_list]


def mutual_information(px: Sequence[float], channel: np.ndarray) -> float:
    """Brute-force I(X;Y) from an input distribution and a row-stochastic matrix."""
    px = np.asarray(px, dtype=float)
    w = np.asarray(channel, dtype=float)
    joint = px[:, None] * w
    py = joint.sum(axis=0)
    mask = joint > 0
    ratio = joint[mask] / (px[:, None] * py[None, :])[mask]
    return float(np.sum(joint[mask] * np.log2(ratio)))
