"""Command-line front end: construction, evaluation, simulation, comparison,
and divergence-certificate workflows emitting reproducible CSV/JSON.

Every command is deterministic given its parameters; outputs written via
``--out`` get a sibling ``<out>.manifest.json`` recording the command, its
parameters, the chain description, and any warnings, so a run can be
reproduced bit-exactly from the manifest alone.

Exit codes: 0 success, 2 usage error (argparse), 3 numeric/validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from pathlib import Path

from . import __version__
from .angles import RationalAngle
from .hardy import build_level, level_summary, sample_angles
from .sim import SimConfig, compare_report, flagged_rows, simulate
from .spectral import (
    BlockChain,
    build_chain,
    chain_manifest,
    density_eval,
    divergence_certificate,
    format_value,
    gamma,
    write_acov_csv,
)

DEFAULT_LEVELS = "500,10000"

_ALIAS = re.compile(r"^(qn(?P<qk>\d+))?(c(?P<ck>\d+))?(?P<off>[+-]\d+)?$")


def _parse_levels(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as err:
        raise ValueError(f"bad --levels value {text!r}") from err


def _build_chain_from_args(args) -> BlockChain:
    spacings = None
    if getattr(args, "spacings", None):
        spacings = [int(s) for s in args.spacings.split(",") if s.strip()]
    return build_chain(
        _parse_levels(args.levels), spacings=spacings, mini=args.mini_mode
    )


def resolve_lag(chain: BlockChain, token: str) -> int:
    """Decimal-string lag or symbolic alias (c2, qn1, qn2c2, optional +/-offset)."""
    token = token.strip()
    if re.fullmatch(r"-?\d+", token):
        return int(token)
    match = _ALIAS.fullmatch(token)
    if not match or (match.group("qk") is None and match.group("ck") is None):
        raise ValueError(f"unparsable lag {token!r}")
    value = 1
    if match.group("qk") is not None:
        k = int(match.group("qk"))
        if not 1 <= k <= chain.K:
            raise ValueError(f"alias {token!r}: no block {k} in a {chain.K}-block chain")
        value *= chain.blocks[k - 1].level.q_n
    if match.group("ck") is not None:
        k = int(match.group("ck"))
        if not 1 <= k <= chain.K:
            raise ValueError(f"alias {token!r}: no block {k} in a {chain.K}-block chain")
        value *= chain.blocks[k - 1].c
    if match.group("off"):
        value += int(match.group("off"))
    return value


def parse_lag_spec(chain: BlockChain, spec: str) -> list[int]:
    """Comma list of lags/aliases; ``A..B`` denotes an inclusive range."""
    lags: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo_text, hi_text = part.split("..", 1)
            lo, hi = resolve_lag(chain, lo_text), resolve_lag(chain, hi_text)
            if hi < lo:
                raise ValueError(f"empty lag range {part!r}")
            if hi - lo > 10**7:
                raise ValueError(f"lag range {part!r} has more than 10^7 entries")
            lags.extend(range(lo, hi + 1))
        else:
            lags.append(resolve_lag(chain, part))
    if not lags:
        raise ValueError("no lags requested")
    for h in lags:
        if h < 0:
            raise ValueError(f"negative lag {h}")
    return lags


def _write_manifest(out: Path, command: str, parameters: dict, chain=None,
                    seed=None, warnings=None) -> None:
    manifest = {
        "command": command,
        "parameters": parameters,
        "chain": chain_manifest(chain) if chain is not None else None,
        "seed": seed,
        "tool_version": __version__,
        "warnings": list(warnings or []),
    }
    path = Path(str(out) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_params(args) -> int:
    level = build_level(args.n, mini=args.mini_mode)
    summary = level_summary(level)
    summary["weight"] = level.weight
    notes = []
    if level.M_n < 0:
        notes.append(
            "M_n is negative at this level; all derived weights use "
            "M_n + pi^2/2, which is positive"
        )
    payload = {
        "command": "params",
        "parameters": {"n": args.n, "mini_mode": args.mini_mode},
        "level": summary,
        "notes": notes,
        "tool_version": __version__,
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_acov(args) -> int:
    chain = _build_chain_from_args(args)
    lags = parse_lag_spec(chain, args.lags)
    records = [gamma(chain, h) for h in lags]
    write_acov_csv(records, args.out)
    _write_manifest(
        args.out,
        "acov",
        {"levels": args.levels, "mini_mode": args.mini_mode, "lags": args.lags},
        chain=chain,
    )
    return 0


def cmd_density(args) -> int:
    if args.grid < 1:
        raise ValueError("grid must be >= 1")
    chain = _build_chain_from_args(args)
    with open(args.out, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta_p", "theta_q", "f"])
        for i in range(args.grid):
            p = 2 * i - args.grid + 1
            angle = RationalAngle(p, args.grid)
            writer.writerow([str(angle.p), str(angle.q), format_value(density_eval(chain, angle))])
    _write_manifest(
        args.out,
        "density",
        {"levels": args.levels, "mini_mode": args.mini_mode, "grid": args.grid},
        chain=chain,
    )
    return 0


def _run_simulation(args):
    chain = _build_chain_from_args(args)
    config = SimConfig(
        length=args.length, count=args.count, seed=args.seed, jitter=args.jitter
    )
    batch = simulate(chain, config)
    return chain, batch


def cmd_simulate(args) -> int:
    chain, batch = _run_simulation(args)
    with open(args.out, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["replicate", "t", "value"])
        for i in range(batch.config.count):
            for t in range(batch.config.length):
                writer.writerow([i, t, format_value(batch.samples[i, t])])
    _write_manifest(
        args.out,
        "simulate",
        {
            "levels": args.levels,
            "mini_mode": args.mini_mode,
            "length": args.length,
            "count": args.count,
            "jitter": args.jitter,
        },
        chain=chain,
        seed=args.seed,
        warnings=[] if batch.factorization_note == "cholesky"
        else [batch.factorization_note],
    )
    return 0


def cmd_compare(args) -> int:
    chain, batch = _run_simulation(args)
    rows = compare_report(chain, batch, args.max_lag)
    with open(args.out, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lag", "theoretical", "empirical_mean", "empirical_se", "z"])
        for r in rows:
            writer.writerow(
                [
                    r.lag,
                    format_value(r.theoretical),
                    format_value(r.empirical_mean),
                    format_value(r.empirical_se),
                    format_value(r.z),
                ]
            )
    flags = flagged_rows(rows)
    _write_manifest(
        args.out,
        "compare",
        {
            "levels": args.levels,
            "mini_mode": args.mini_mode,
            "length": args.length,
            "count": args.count,
            "max_lag": args.max_lag,
            "jitter": args.jitter,
            "estimator": "known-zero-mean",
        },
        chain=chain,
        seed=args.seed,
        warnings=[f"|z| > 4 at lag {r.lag}" for r in flags],
    )
    return 0


def cmd_divergence(args) -> int:
    if args.samples < 1:
        raise ValueError("samples must be >= 1")
    chain = _build_chain_from_args(args)
    if not 1 <= args.block <= chain.K:
        raise ValueError(f"block {args.block} outside 1..{chain.K}")
    angles = sample_angles(args.samples, args.seed)
    in_set = 0
    violations = 0
    with open(args.out, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["theta_p", "theta_q", "j", "p", "block_sum", "lower_bound", "holds"]
        )
        for angle in angles:
            cert = divergence_certificate(chain, args.block, angle)
            if cert is None:
                continue
            in_set += 1
            violations += 0 if cert.holds else 1
            writer.writerow(
                [
                    str(angle.p),
                    str(angle.q),
                    cert.j,
                    str(cert.p),
                    format_value(cert.block_sum),
                    format_value(cert.lower_bound),
                    int(cert.holds),
                ]
            )
    _write_manifest(
        args.out,
        "divergence",
        {
            "levels": args.levels,
            "mini_mode": args.mini_mode,
            "block": args.block,
            "samples": args.samples,
            "in_set_fraction": in_set / args.samples,
            "bound_violations": violations,
        },
        chain=chain,
        seed=args.seed,
    )
    return 0


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def _add_chain_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--levels", default=DEFAULT_LEVELS,
                        help="comma list of level indices (default %(default)s)")
    parser.add_argument("--mini-mode", action="store_true",
                        help="mini construction profile (small degree seeds)")
    parser.add_argument("--spacings", default=None,
                        help="explicit odd spacing list (default: paper rule)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardyrog",
        description="Long-memory spectral model: construction, autocovariances, "
        "simulation, divergence certificates.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("params", help="level summary JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mini-mode", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_params)

    p = sub.add_parser("acov", help="autocovariance CSV at requested lags")
    _add_chain_flags(p)
    p.add_argument("--lags", required=True,
                   help="comma list; A..B ranges; aliases like c2, qn1, qn2c2, c2-1")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_acov)

    p = sub.add_parser("density", help="density values on a symmetric grid")
    _add_chain_flags(p)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_density)

    for name, help_text in (
        ("simulate", "trajectory CSV"),
        ("compare", "theory-vs-empirics comparison CSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_chain_flags(p)
        p.add_argument("--length", type=int, required=True)
        p.add_argument("--count", type=int, required=True)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--jitter", type=float, default=0.0)
        p.add_argument("--out", required=True)
        if name == "compare":
            p.add_argument("--max-lag", type=int, required=True)
            p.set_defaults(fn=cmd_compare)
        else:
            p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("divergence", help="divergence-certificate CSV")
    _add_chain_flags(p)
    p.add_argument("--block", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_divergence)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, ArithmeticError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
