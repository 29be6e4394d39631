"""Command-line front end: sweeps and experiment runs emitting CSV.

Every CSV starts with a ``#`` comment recording the tool version and the
full resolved configuration, followed by a header row.  Output depends
only on the configuration (seed and worker count included).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .capacity import gain_table
from .chain import (MODES, ProtocolError, paced_frames, run_chain,
                    trace_rows, TRACE_COLUMNS)
from .channel import ChannelParams, n0_to_snr_db, snr_db_to_n0
from .detect import SCHEMES, ber_analytic, ber_monte_carlo
from .mapping import MappingError, PncScheme, SymbolSet, pam_scheme, verify_mapping, mapping_rows
from .syncerr import (freq_penalty_db, phase_penalty_avg_db, phase_penalty_db,
                      time_penalty_avg_db, time_penalty_db, time_penalty_worst_db)

DEFAULT_SEED = 20070101
COMMANDS = ("ber", "capacity", "chain", "sync", "map-check")


class UsageError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return "" if x is None else str(x)


def parse_grid(text) -> list[float]:
    """``start:stop:step`` (both ends inclusive) or a comma-separated list."""
    if isinstance(text, (list, tuple)):
        values = [float(v) for v in text]
    elif ":" in str(text):
        try:
            start, stop, step = (float(p) for p in str(text).split(":"))
        except ValueError:
            raise UsageError(f"bad grid {text!r}; expected start:stop:step") from None
        if step == 0 or (stop - start) / step < 0:
            raise UsageError(f"grid {text!r} does not reach its endpoint")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + k * step, 12) for k in range(count)]
    else:
        try:
            values = [float(p) for p in str(text).split(",") if p.strip()]
        except ValueError:
            raise UsageError(f"bad grid {text!r}") from None
    if not values:
        raise UsageError("grid is empty")
    return values


def _write_csv(out, config: dict, header: Sequence[str], rows, trailer: Sequence[str] = ()) -> None:
    w = csv.writer(out, lineterminator="\n")
    out.write(f"# pnclab {__version__} {json.dumps(config, sort_keys=True)}\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    for line in trailer:
        out.write(f"# {line}\n")


def _noise_points(cfg: dict) -> list[tuple[float, float]]:
    """(snr_db, n0) pairs from either ``n0`` or ``snr``."""
    if cfg.get("n0") is not None:
        pts = []
        for n0 in parse_grid(cfg["n0"]):
            if not n0 > 0:
                raise ValueError(f"noise density N0 must be positive, got {n0!r}")
            pts.append((n0_to_snr_db(n0), n0))
        return pts
    return [(s, snr_db_to_n0(s)) for s in parse_grid(cfg["snr"])]


def cmd_ber(cfg: dict, out) -> int:
    schemes = cfg["schemes"] or list(SCHEMES)
    for s in schemes:
        if s not in SCHEMES:
            raise UsageError(f"unknown scheme {s!r}; expected one of {SCHEMES}")
    if cfg["trials"] < 10_000:
        raise UsageError("--trials must be >= 10000")
    rows = []
    for gi, (snr, n0) in enumerate(_noise_points(cfg)):
        for scheme in schemes:
            est = ber_monte_carlo(scheme, n0, cfg["trials"], ChannelParams(n0, cfg["seed"]),
                                  stream_index=(gi, SCHEMES.index(scheme)), workers=cfg["workers"])
            rows.append((snr, scheme, ber_analytic(scheme, n0), est.p_hat, est.std_err))
    _write_csv(out, cfg, ("snr_db", "scheme", "ber_analytic", "ber_mc", "std_err"), rows)
    return 0


def cmd_capacity(cfg: dict, out) -> int:
    rows = []
    for snr, n0 in _noise_points(cfg):
        (r,) = gain_table([snr])
        rows.append((snr, r.c_traditional, r.c_snc, r.c_pnc_lower, r.c_pnc_upper, r.gain_lower, r.gain_upper))
    _write_csv(out, cfg, ("snr_db", "c_trad", "c_snc", "c_pnc_lo", "c_pnc_up", "gain_lo", "gain_up"), rows)
    return 0


def cmd_chain(cfg: dict, out) -> int:
    n, slots = cfg["n"], cfg["slots"]
    rng = np.random.default_rng(cfg["seed"])
    opportunities = slots // 2 + 1
    x = paced_frames("X", opportunities, cfg["x_rate"], cfg["frame_bits"], rng)
    y = paced_frames("Y", opportunities, cfg["y_rate"], cfg["frame_bits"], rng)
    report = run_chain(n, cfg["mode"], x, y, slots)
    summary = (f"throughput n={n} mode={report.mode} warmup={report.warmup} "
               f"x={report.throughput_x:.12g} y={report.throughput_y:.12g}")
    _write_csv(out, cfg, TRACE_COLUMNS, trace_rows(report.trace), [summary])
    print(summary, file=sys.stderr)
    return 0


def cmd_sync(cfg: dict, out) -> int:
    pts = cfg["points"]
    beta, snr0 = cfg["beta"], cfg["snr0"]
    rows = []
    for theta in np.linspace(-math.pi / 2, math.pi / 2, pts, endpoint=False):
        rows.append(("phase", theta, phase_penalty_db(theta)))
    for df in np.linspace(0.0, cfg["df_max"], pts):
        rows.append(("frequency", df, freq_penalty_db(df)))
    for dt in np.linspace(-0.5, 0.5, pts):
        rows.append(("time", dt, time_penalty_db(dt, beta, snr0).penalty_db))
    trailer = [
        f"phase avg_db={phase_penalty_avg_db():.12g} worst_db={phase_penalty_db(math.pi / 2):.12g}",
        f"frequency worst_db={freq_penalty_db(cfg['df_max']):.12g}",
        f"time beta={beta:.12g} snr0_db={snr0:.12g} avg_db={time_penalty_avg_db(beta, snr0):.12g} "
        f"worst_db={time_penalty_worst_db(beta, snr0):.12g}",
    ]
    _write_csv(out, cfg, ("family", "offset", "penalty_db"), rows, trailer)
    return 0


def cmd_map_check(cfg: dict, out) -> int:
    L = cfg["L"]
    if cfg["code"] == "mod":
        scheme = pam_scheme(L)
    else:
        if L & (L - 1):
            raise UsageError("--code xor needs L to be a power of two")
        scheme = PncScheme(SymbolSet(L), lambda a, b: a ^ b,
                           {m: 2 * m - (L - 1) for m in range(L)}, name=f"{L}-PAM/xor")
    result = verify_mapping(scheme)
    header = ("m_i", "m_j", "e_i", "e_j", "e_sum", "h", "code")
    rows = [tuple(r[k] for k in header) for r in mapping_rows(scheme)]
    if result.ok:
        table = ", ".join(f"{fmt(e)}->{m}" for e, m in result.table.items())
        _write_csv(out, cfg, header, rows, [f"mapping {scheme.name} ok: h = {{{table}}}"])
        return 0
    p, q = result.violation
    msg = f"mapping {scheme.name} violation: pairs {p} and {q} superpose equally but code differently"
    _write_csv(out, cfg, header, rows, [msg])
    print(msg, file=sys.stderr)
    return 1


HANDLERS = {"ber": cmd_ber, "capacity": cmd_capacity, "chain": cmd_chain,
            "sync": cmd_sync, "map-check": cmd_map_check}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pnclab", description="Physical-layer network coding experiments.")
    p.add_argument("--version", action="version", version=f"pnclab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with option values; flags override it")
        sp.add_argument("-o", "--output", default="-", help="CSV destination ('-' for stdout)")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        return sp

    b = common(sub.add_parser("ber", help="analytic vs simulated BER (relay reception)"))
    b.add_argument("--snr", default="0:10:2", help="SNR grid in dB, start:stop:step or a,b,c")
    b.add_argument("--n0", default=None, help="N0 grid instead of --snr")
    b.add_argument("--trials", type=int, default=1_000_000)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--schemes", nargs="*", default=None, help=f"subset of {' '.join(SCHEMES)}")

    c = common(sub.add_parser("capacity", help="capacity per cycle and gains over traditional relaying"))
    c.add_argument("--snr", default="-20:20:5")
    c.add_argument("--n0", default=None)

    ch = common(sub.add_parser("chain", help="slot trace of the n-node forwarding protocol"))
    ch.add_argument("--n", type=int, default=5)
    ch.add_argument("--mode", default="bidirectional", choices=[*MODES, "uni", "bi"])
    ch.add_argument("--slots", type=int, default=40)
    ch.add_argument("--x-rate", dest="x_rate", type=float, default=0.5)
    ch.add_argument("--y-rate", dest="y_rate", type=float, default=0.5)
    ch.add_argument("--frame-bits", dest="frame_bits", type=int, default=32)

    s = common(sub.add_parser("sync", help="synchronisation-error penalty curves"))
    s.add_argument("--beta", type=float, default=0.5)
    s.add_argument("--snr0", type=float, default=10.0)
    s.add_argument("--points", type=int, default=101)
    s.add_argument("--df-max", dest="df_max", type=float, default=0.1)

    m = common(sub.add_parser("map-check", help="check/build a PNC demodulation map for L-PAM"))
    m.add_argument("--L", type=int, default=4)
    m.add_argument("--code", choices=("mod", "xor"), default="mod")
    return p


def _load_config(argv: Sequence[str]) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    with open(known.config) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


_GRID_FLAGS = ("--snr", "--n0")


def _glue_negative_grids(argv: Sequence[str]) -> list[str]:
    # argparse reads "-5:5:5" as an option; rewrite to "--snr=-5:5:5"
    out, it = [], iter(argv)
    for tok in it:
        if tok in _GRID_FLAGS:
            nxt = next(it, None)
            if nxt is not None and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def resolve(argv: Sequence[str]) -> dict:
    """Parse ``argv`` into a plain config dict (config file first, flags on top)."""
    argv = _glue_negative_grids(argv)
    parser = build_parser()
    file_cfg = _load_config(argv)
    if file_cfg:
        file_cfg.pop("command", None)
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                known = {a.dest for a in sp._actions}
                sp.set_defaults(**{k: v for k, v in file_cfg.items() if k in known})
    args = parser.parse_args(argv)
    cfg = vars(args)
    cfg.pop("config", None)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = resolve(argv)
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"pnclab: error: {exc}", file=sys.stderr)
        return 2
    command = cfg["command"]
    out_path = cfg.pop("output")
    buf = io.StringIO()
    try:
        status = HANDLERS[command](cfg, buf)
    except UsageError as exc:
        print(f"pnclab {command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, MappingError, ProtocolError) as exc:
        print(f"pnclab {command}: error: {exc}", file=sys.stderr)
        return 1
    if out_path == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return status


if __name__ == "__main__":
    sys.exit(main())
