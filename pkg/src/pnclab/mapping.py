"""PNC modulation/demodulation mappings.

Symbols are the integers ``0..L-1``.  A scheme pairs a network-coding
operation on symbols with a one-to-one amplitude map; the relay needs a
demodulation map that turns the *sum* of two amplitudes straight into the
network-coded symbol.  :func:`verify_mapping` decides whether such a map
exists and builds it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import product
from typing import Callable, Mapping


class MappingError(ValueError):
    """Raised for malformed symbols, amplitudes or schemes."""


class InvalidSuperposition(MappingError):
    """A superposed amplitude that no pair of transmitted symbols can produce."""


@dataclass(frozen=True)
class SymbolSet:
    L: int

    def __post_init__(self):
        if not isinstance(self.L, int) or self.L < 2:
            raise MappingError(f"alphabet size must be an integer >= 2, got {self.L!r}")

    @property
    def symbols(self) -> range:
        return range(self.L)

    def check(self, m: int) -> int:
        if not isinstance(m, int) or not 0 <= m < self.L:
            raise MappingError(f"symbol {m!r} outside 0..{self.L - 1}")
        return m


@dataclass(frozen=True)
class QpskStreamPair:
    """One QPSK symbol viewed as two independent BPSK bits."""

    in_phase_bit: int
    quadrature_bit: int

    def __post_init__(self):
        for b in (self.in_phase_bit, self.quadrature_bit):
            if b not in (0, 1):
                raise MappingError(f"QPSK stream bits must be 0 or 1, got {b!r}")

    def modulate(self) -> tuple[int, int]:
        return bpsk_modulate(self.in_phase_bit), bpsk_modulate(self.quadrature_bit)


def bpsk_modulate(bit: int) -> int:
    if bit not in (0, 1):
        raise MappingError(f"bit must be 0 or 1, got {bit!r}")
    return 2 * bit - 1


def pnc_demap_bpsk_sum(total: float) -> int:
    """Map a noiseless sum of two BPSK amplitudes to the XOR of their bits."""
    if total == 0:
        return 1
    if total in (-2, 2):
        return 0
    raise InvalidSuperposition(f"{total!r} is not a sum of two BPSK amplitudes")


def pnc_demap_qpsk(i_sum: float, q_sum: float) -> QpskStreamPair:
    return QpskStreamPair(pnc_demap_bpsk_sum(i_sum), pnc_demap_bpsk_sum(q_sum))


def pam_modulate(m: int, L: int) -> int:
    SymbolSet(L).check(m)
    return 2 * m - (L - 1)


def pam_code_add(m_i: int, m_j: int, L: int) -> int:
    s = SymbolSet(L)
    return (s.check(m_i) + s.check(m_j)) % L


def pam_pnc_demap(e_sum: float, L: int) -> int:
    """Closed-form relay demapping for L-PAM with modulo-L addition."""
    SymbolSet(L)
    if e_sum != int(e_sum):
        raise InvalidSuperposition(f"{e_sum!r} is not an integer amplitude")
    e = int(e_sum)
    if e % 2 or abs(e) > 2 * (L - 1):
        raise InvalidSuperposition(f"{e_sum!r} is not a sum of two {L}-PAM amplitudes")
    return (e // 2 - 1) % L


@dataclass(frozen=True)
class PncScheme:
    """Network code, modulation map, and (once verified) demodulation map.

    ``mod_map`` is stored as a symbol -> amplitude mapping so it can be
    inspected for injectivity; ``demod_map`` stays ``None`` until
    :func:`verify_mapping` fills it in.
    """

    symbol_set: SymbolSet
    code_add: Callable[[int, int], int]
    mod_map: Mapping[int, float]
    demod_map: Mapping[float, int] | None = field(default=None, compare=False)
    name: str = ""

    def modulate(self, m: int) -> float:
        return self.mod_map[self.symbol_set.check(m)]

    def demodulate(self, e_sum: float) -> int:
        if self.demod_map is None:
            raise MappingError("scheme has no demodulation map; run verify_mapping first")
        try:
            return self.demod_map[e_sum]
        except KeyError:
            raise InvalidSuperposition(f"{e_sum!r} is not a valid superposition") from None


def pam_scheme(L: int) -> PncScheme:
    """L-PAM with f(m) = 2m - (L-1) and modulo-L addition."""
    return PncScheme(
        SymbolSet(L),
        lambda a, b: (a + b) % L,
        {m: pam_modulate(m, L) for m in range(L)},
        name=f"{L}-PAM/mod-{L}",
    )


def bpsk_xor_scheme() -> PncScheme:
    return PncScheme(SymbolSet(2), lambda a, b: a ^ b, {0: -1, 1: 1}, name="BPSK/XOR")


Pair = tuple[int, int]


@dataclass(frozen=True)
class MappingResult:
    """Outcome of :func:`verify_mapping`.

    Exactly one of ``table`` and ``violation`` is set.  ``violation`` holds
    two symbol pairs that superpose to the same amplitude but code to
    different symbols, so no demodulation map can exist.
    """

    scheme: PncScheme
    table: dict[float, int] | None
    violation: tuple[Pair, Pair] | None

    @property
    def ok(self) -> bool:
        return self.violation is None


def verify_mapping(scheme: PncScheme) -> MappingResult:
    symbols = list(scheme.symbol_set.symbols)
    if set(scheme.mod_map) != set(symbols):
        raise MappingError("mod_map must be defined on exactly the symbol set")
    amplitudes = [scheme.mod_map[m] for m in symbols]
    if len(set(amplitudes)) != len(amplitudes):
        raise MappingError("mod_map is not one-to-one")

    pairs = list(product(symbols, repeat=2))
    table: dict[float, int] = {}
    conflict = False
    for mi, mj in pairs:
        e = scheme.mod_map[mi] + scheme.mod_map[mj]
        code = scheme.code_add(mi, mj)
        # first decomposition (ascending m_i) is the representative
        if e not in table:
            table[e] = code
        elif table[e] != code:
            conflict = True
            break

    if not conflict:
        table = dict(sorted(table.items()))
        return MappingResult(replace(scheme, demod_map=table), table, None)

    # lexicographically smallest conflicting pair-of-pairs
    for a, p in enumerate(pairs):
        ep = scheme.mod_map[p[0]] + scheme.mod_map[p[1]]
        cp = scheme.code_add(*p)
        for q in pairs[a + 1:]:
            if scheme.mod_map[q[0]] + scheme.mod_map[q[1]] == ep and scheme.code_add(*q) != cp:
                return MappingResult(scheme, None, (p, q))
    raise AssertionError("conflict detected but no violating pair found")


def mapping_rows(scheme: PncScheme) -> list[dict]:
    """Per-pair rows in the layout of the relay demapping tables."""
    result = verify_mapping(scheme)
    rows = []
    for mi, mj in product(scheme.symbol_set.symbols, repeat=2):
        ei, ej = scheme.mod_map[mi], scheme.mod_map[mj]
        rows.append({
            "m_i": mi,
            "m_j": mj,
            "e_i": ei,
            "e_j": ej,
            "e_sum": ei + ej,
            "h": result.table[ei + ej] if result.ok else None,
            "code": scheme.code_add(mi, mj),
        })
    return rows
