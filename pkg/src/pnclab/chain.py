"""Frame forwarding over an n-node linear PNC chain.

Odd nodes transmit in odd slots and even nodes in even slots.  A relay
receives the XOR of its two neighbours' frames (what PNC demapping hands
it), strips the frame it sent last, and forwards what is left in its next
transmit slot.  End nodes inject their own source frame XORed onto what
they last decoded, and decode by stripping their own last injection.

Frames carry their payload bits *and* a provenance tag set (``X3``,
``Y1``...), XORed as a symmetric difference, so traces stay readable and
decoding can be checked symbolically.  The null frame :data:`NULL` is the
control-plane "silence" marker; it is not the all-zeros payload.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class FrameError(ValueError):
    pass


class ProtocolError(RuntimeError):
    def __init__(self, slot: int, message: str):
        super().__init__(f"slot {slot}: {message}")
        self.slot = slot


class _Null:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NULL"

    def __reduce__(self):
        return (_Null, ())


NULL = _Null()


def _tag_key(tag: str):
    m = re.fullmatch(r"([A-Za-z]+)(-?\d+)", tag)
    return (m.group(1), int(m.group(2))) if m else (tag, 0)


@dataclass(frozen=True)
class Frame:
    bits: int
    length: int
    tags: frozenset = frozenset()

    def __post_init__(self):
        if self.length <= 0:
            raise FrameError("frame length must be positive")
        if not 0 <= self.bits < (1 << self.length):
            raise FrameError("payload does not fit the frame length")

    @property
    def label(self) -> str:
        return "+".join(sorted(self.tags, key=_tag_key)) if self.tags else "ZERO"

    def to_array(self) -> np.ndarray:
        return np.array([(self.bits >> k) & 1 for k in range(self.length)], dtype=np.uint8)

    @classmethod
    def random(cls, length: int, rng: np.random.Generator, tag: str | None = None) -> "Frame":
        raw = rng.integers(0, 256, size=(length + 7) // 8, dtype=np.uint8).tobytes()
        bits = int.from_bytes(raw, "little") & ((1 << length) - 1)
        return cls(bits, length, frozenset({tag}) if tag else frozenset())


def frame_xor(f1, f2):
    """GF(2) sum of two frames; ``NULL`` is the identity on either side."""
    if f1 is NULL:
        return f2
    if f2 is NULL:
        return f1
    if f1.length != f2.length:
        raise FrameError(f"frame length mismatch: {f1.length} vs {f2.length}")
    return Frame(f1.bits ^ f2.bits, f1.length, f1.tags ^ f2.tags)


def frame_inverse(f):
    return f


def frame_label(f) -> str:
    return "NULL" if f is NULL else f.label


def same_content(f1, f2) -> bool:
    """Equality with ``NULL`` identified with the all-zeros, untagged frame."""
    def norm(f):
        return (0, frozenset()) if f is NULL else (f.bits, f.tags)
    return norm(f1) == norm(f2)


def _single_index(f, prefix: str) -> int | None:
    if f is NULL or len(f.tags) != 1:
        return None
    (tag,) = f.tags
    name, idx = _tag_key(tag)
    return idx if name == prefix else None


def make_frames(prefix: str, count: int, frame_bits: int, rng: np.random.Generator) -> list:
    return [Frame.random(frame_bits, rng, f"{prefix}{l}") for l in range(1, count + 1)]


def paced_frames(prefix: str, count: int, rate: float, frame_bits: int,
                 rng: np.random.Generator) -> list:
    """Source stream at ``rate`` frames/slot, padded with ``NULL`` for the slack.

    An end node gets one transmit opportunity every two slots, so a data
    frame fills a fraction ``2*rate`` of opportunities.  Data frames are
    spread by largest remainder: opportunity ``k`` carries data when
    ``floor(2*rate*k)`` steps up.  Entry ``l-1`` is tagged ``{prefix}{l}``.
    """
    duty = Fraction(rate).limit_denominator(10**6) * 2
    if not 0 <= duty <= 1:
        raise ValueError(f"rate must lie in [0, 0.5], got {rate!r}")
    out = []
    for k in range(1, count + 1):
        if (duty * k).__floor__() > (duty * (k - 1)).__floor__():
            out.append(Frame.random(frame_bits, rng, f"{prefix}{k}"))
        else:
            out.append(NULL)
    return out


@dataclass(frozen=True)
class SlotRecord:
    """Everything every node sent, received and buffered in one slot (index ``i-1`` is node ``i``)."""

    slot: int
    sent: tuple
    received: tuple
    buffer: tuple
    # per node: "pnc" (two senders), "single", "none" or "" when transmitting
    rx_mode: tuple


MODES = ("unidirectional", "bidirectional")


def _mode(mode: str) -> str:
    aliases = {"uni": "unidirectional", "bi": "bidirectional"}
    mode = aliases.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


class ChainSim:
    """Slot-synchronous state of an n-node chain.

    ``x_frames[l-1]`` is X_l injected at node 1, ``y_frames[l-1]`` is Y_l
    injected at node n; indices past the end of a list are ``NULL``.  In
    unidirectional mode node n has no source.
    """

    def __init__(self, n: int, mode: str, x_frames: Sequence, y_frames: Sequence = ()):
        if n < 3:
            raise ValueError("a chain needs at least 3 nodes")
        self.n = n
        self.mode = _mode(mode)
        self.x_frames = list(x_frames)
        self.y_frames = list(y_frames) if self.mode == "bidirectional" else []
        self.slot = 0
        self.buffers = [NULL] * n
        self._injected = [NULL] * n
        self.trace: list[SlotRecord] = []

    def transmits(self, i: int, j: int) -> bool:
        return i % 2 == j % 2

    def source(self, which: str, l: int):
        frames = self.x_frames if which == "X" else self.y_frames
        return frames[l - 1] if 1 <= l <= len(frames) else NULL

    def step(self) -> "ChainSim":
        j = self.slot + 1
        n = self.n
        prev = self.buffers
        buf = list(prev)
        sent = [NULL] * n

        for i in range(1, n + 1):
            if not self.transmits(i, j):
                continue
            if i == 1 or i == n:
                # X_{(j+1)/2} at node 1; Y_{floor((j+1)/2)} at node n (either parity of n)
                fresh = self.source("X" if i == 1 else "Y", (j + 1) // 2)
                buf[i - 1] = frame_xor(fresh, prev[i - 1])
                self._injected[i - 1] = fresh
            sent[i - 1] = buf[i - 1]

        received = [NULL] * n
        rx_mode = [""] * n
        for i in range(1, n + 1):
            if self.transmits(i, j):
                continue
            neigh = [sent[k - 1] for k in (i - 1, i + 1) if 1 <= k <= n]
            active = [f for f in neigh if f is not NULL]
            # a silent neighbour has announced itself, so fewer than two
            # active senders means plain (non-PNC) demodulation
            rx_mode[i - 1] = ("none", "single", "pnc")[len(active)]
            r = NULL
            for f in neigh:
                r = frame_xor(r, f)
            received[i - 1] = r
            if i == 1 or i == n:
                buf[i - 1] = frame_xor(frame_inverse(self._injected[i - 1]), r)
            else:
                buf[i - 1] = frame_xor(frame_inverse(prev[i - 1]), r)

        self.slot = j
        self.buffers = buf
        self.trace.append(SlotRecord(j, tuple(sent), tuple(received), tuple(buf), tuple(rx_mode)))
        return self


def step_slot(sim: ChainSim) -> ChainSim:
    return sim.step()


def scheduled_frame(n: int, i: int, j: int, x_frames: Sequence, y_frames: Sequence):
    """Closed-form S_i[j]: X_{(j-i+2)/2} XOR Y_{floor((j+i-n+1)/2)} in transmit slots, else NULL."""
    if i % 2 != j % 2:
        return NULL

    def pick(frames, l):
        return frames[l - 1] if 1 <= l <= len(frames) else NULL

    return frame_xor(pick(x_frames, (j - i + 2) // 2), pick(y_frames, (j + i - n + 1) // 2))


def expected_decode(n: int, j: int, end: int, x_frames: Sequence, y_frames: Sequence):
    """What node 1 (``end=1``) or node n holds after a receive slot ``j``.

    Node n holds X_{(j-n+3)/2}, node 1 holds Y_{floor((j-n+3)/2)}.
    """
    if end == 1:
        frames, l = y_frames, (j - n + 3) // 2
    else:
        frames, l = x_frames, (j - n + 3) // 2
    return frames[l - 1] if 1 <= l <= len(frames) else NULL


@dataclass
class ChainReport:
    n: int
    mode: str
    slots: int
    warmup: int
    delivered_x: list = field(default_factory=list)  # (slot, l) at node n
    delivered_y: list = field(default_factory=list)  # (slot, l) at node 1
    trace: list = field(default_factory=list, repr=False)

    def _rate(self, deliveries) -> float:
        window = self.slots - self.warmup
        return sum(1 for s, _ in deliveries if s > self.warmup) / window

    @property
    def throughput_x(self) -> float:
        return self._rate(self.delivered_x)

    @property
    def throughput_y(self) -> float:
        return self._rate(self.delivered_y)


def run_chain(n: int, mode: str, x_frames: Sequence, y_frames: Sequence = (),
              total_slots: int | None = None, warmup: int | None = None) -> ChainReport:
    """Run the chain and check end-node decoding after every receive slot.

    Raises :class:`ProtocolError` on the first slot where an end node's
    buffer differs from the frame it should have decoded.  Throughput is
    decoded data frames per slot after ``warmup`` (default ``2n``) slots.
    """
    if n < 3:
        raise ValueError("a chain needs at least 3 nodes")
    if total_slots is None:
        total_slots = 10 * n
    if total_slots < 4 * n:
        raise ValueError(f"total_slots must be >= 4n = {4 * n}")
    warmup = 2 * n if warmup is None else warmup
    sim = ChainSim(n, mode, x_frames, y_frames)
    report = ChainReport(n, sim.mode, total_slots, warmup)
    for _ in range(total_slots):
        rec = sim.step().trace[-1]
        j = rec.slot
        for end, prefix, sink in ((n, "X", report.delivered_x), (1, "Y", report.delivered_y)):
            if sim.transmits(end, j):
                continue
            held = rec.buffer[end - 1]
            want = expected_decode(n, j, end, sim.x_frames, sim.y_frames)
            if not same_content(held, want):
                raise ProtocolError(j, f"node {end} holds {frame_label(held)}, expected {frame_label(want)}")
            l = _single_index(held, prefix)
            if l is not None:
                sink.append((j, l))
    report.trace = sim.trace
    return report


TRACE_COLUMNS = ("slot", "node", "role", "frame", "buffer")


def trace_rows(trace: Iterable[SlotRecord]) -> list[tuple]:
    rows = []
    for rec in trace:
        for i in range(1, len(rec.sent) + 1):
            tx = i % 2 == rec.slot % 2
            f = rec.sent[i - 1] if tx else rec.received[i - 1]
            rows.append((rec.slot, i, "tx" if tx else "rx", frame_label(f), frame_label(rec.buffer[i - 1])))
    return rows


def trace_csv(trace: Iterable[SlotRecord]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    w.writerows(trace_rows(trace))
    return out.getvalue()


def exchange_slots(scheme: str, frame_bits: int = 16, seed: int = 0) -> int:
    """Slots needed for nodes 1 and 3 of a 3-node chain to swap one frame each.

    ``traditional`` and ``snc`` are small reference schedules; ``pnc`` runs
    the chain state machine until both ends have decoded.
    """
    rng = np.random.default_rng(seed)
    s1 = Frame.random(frame_bits, rng, "X1")
    s3 = Frame.random(frame_bits, rng, "Y1")
    if scheme == "traditional":
        # N1->N2, N2->N3, N3->N2, N2->N1; the relay stores and forwards
        slots = [("1>2", s1), ("2>3", s1), ("3>2", s3), ("2>1", s3)]
        assert same_content(slots[1][1], s1) and same_content(slots[3][1], s3)
        return len(slots)
    if scheme == "snc":
        # N1->N2, N3->N2, N2 broadcasts S1 xor S3
        coded = frame_xor(s1, s3)
        slots = [("1>2", s1), ("3>2", s3), ("2>1,3", coded)]
        assert same_content(frame_xor(s1, coded), s3) and same_content(frame_xor(s3, coded), s1)
        return len(slots)
    if scheme == "pnc":
        sim = ChainSim(3, "bidirectional", [s1], [s3])
        while sim.slot < 8:
            sim.step()
            if same_content(sim.buffers[0], s3) and same_content(sim.buffers[2], s1):
                return sim.slot
        raise ProtocolError(sim.slot, "PNC exchange did not complete")
    raise ValueError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class SyncBudget:
    """Per-period synchronisation budget of an N-node chain.

    Nodes are synchronised pairwise in basic groups, odd nodes then even
    nodes, taking ``dt_bg`` seconds per group; resync happens every ``t_p``.
    """

    n_nodes: int
    dt_bg: float
    t_p: float

    @property
    def basic_groups(self) -> int:
        return (self.n_nodes - 1) // 2

    @property
    def t_s(self) -> float:
        return (self.n_nodes - 2) * self.dt_bg


def sync_overhead(budget: SyncBudget) -> float:
    if budget.n_nodes < 3 or budget.dt_bg < 0 or budget.t_p <= 0:
        raise ValueError("need n_nodes >= 3, dt_bg >= 0 and t_p > 0")
    if budget.t_s > budget.t_p:
        raise ValueError(f"infeasible budget: sync time {budget.t_s} exceeds period {budget.t_p}")
    return budget.t_s / budget.t_p
