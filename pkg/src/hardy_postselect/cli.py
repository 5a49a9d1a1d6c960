"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 infeasible Hardy region,
4 insufficient data.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import jsonschema
import numpy as np

from . import bell, events, hardy, ifm, lhv
from .errors import DomainError, HardyError, InfeasibleError, InsufficientDataError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_NO_DATA = 4

SEED_ENV = "HARDY_POSTSELECT_SEED"

SWEEP_COLUMNS = (
    "t1p", "r2p", "u_squared", "hardy_probability",
    "ch_postselected_margin", "ch_total_margin", "ch_simplified_lhs",
)

_odd = {"type": "integer", "not": {"multipleOf": 2}}
_unit = {"type": "number", "minimum": 0, "maximum": 1}

SPEC_SCHEMA = {
    "type": "object",
    "properties": {
        "config": {
            "type": "object",
            "properties": {
                "q": _unit,
                "q2": _unit,
                "t1p": _unit,
                "r2p": _unit,
                "u1p": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "phi0": {"type": "number"},
                "n1": _odd,
                "n2": _odd,
                "n3": _odd,
            },
            "additionalProperties": False,
        },
        "n": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "weights": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 4, "maxItems": 4},
        "resolution": {"type": "integer", "minimum": 2},
        "u": _unit,
        "r2": _unit,
        "strategy": {"type": "string"},
    },
}


def load_spec(path: Optional[str]) -> dict:
    """Read and validate an experiment spec; a ``solve`` output is accepted as is."""
    if not path:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    jsonschema.validate(data, SPEC_SCHEMA)
    return data


def _config_from(args, spec: dict) -> hardy.HardyConfiguration:
    cfg = dict(spec.get("config", {}))
    for key in ("q", "q2", "t1p", "r2p", "u1p", "phi0", "n1", "n2", "n3"):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    # a command-line q overrides explicit splitters from a file and vice versa
    if args.q is not None or args.q2 is not None:
        cfg.pop("t1p", None)
        cfg.pop("r2p", None)
    if args.t1p is not None or args.r2p is not None:
        cfg.pop("q", None)
        cfg.pop("q2", None)
    if "q2" in cfg:
        q2 = cfg.pop("q2")
        if not 0.0 <= q2 <= 1.0:
            raise DomainError(f"q2={q2!r} outside [0, 1]")
        cfg["q"] = math.sqrt(q2)
    if "q" in cfg:
        q = cfg.pop("q")
        cfg.setdefault("t1p", q)
        cfg.setdefault("r2p", q)
    if "t1p" not in cfg or "r2p" not in cfg:
        raise DomainError("need --q, --q2, or both --t1p and --r2p")
    return hardy.HardyConfiguration(
        t1p=float(cfg["t1p"]),
        r2p=float(cfg["r2p"]),
        u1p=float(cfg.get("u1p", 1.0)),
        phi0=float(cfg.get("phi0", 0.0)),
        n1=int(cfg.get("n1", 1)),
        n2=int(cfg.get("n2", 1)),
        n3=int(cfg.get("n3", 1)),
    )


def _emit(text: str, path: Optional[str], out) -> None:
    if path:
        Path(path).write_text(text)
    else:
        out.write(text)
        if not text.endswith("\n"):
            out.write("\n")


def _dump(obj) -> str:
    # json writes floats with repr, the shortest string that round-trips exactly
    return json.dumps(obj, indent=2)


def cmd_solve(args, spec, out):
    solution = hardy.solve_hardy(_config_from(args, spec))
    _emit(_dump(solution.to_dict()), args.output, out)


def cmd_probs(args, spec, out):
    solution = hardy.solve_hardy(_config_from(args, spec))
    tables = solution.tables(oracle=args.oracle)
    payload = {
        "config": solution.config.to_dict(),
        "source": "oracle" if args.oracle else "closed-form",
        "tables": {k: t.to_dict() for k, t in tables.items()},
        "marginals": {k: t.marginals for k, t in tables.items()},
    }
    _emit(_dump(payload), args.output, out)


def cmd_audit(args, spec, out):
    solution = hardy.solve_hardy(_config_from(args, spec))
    reports = bell.audit_solution(solution, oracle=args.oracle)
    payload = {
        "config": solution.config.to_dict(),
        "hardy_probability": solution.hardy_probability,
        "reports": {k: r.to_dict() for k, r in reports.items()},
    }
    _emit(_dump(payload), args.output, out)


def _parse_strategy(label: str) -> lhv.DeterministicStrategy:
    try:
        left, right = label.split("|")
        return lhv.DeterministicStrategy(tuple(left), tuple(right))
    except ValueError:
        raise DomainError(f"strategy must look like 'LU|AU', got {label!r}") from None


def cmd_sample(args, spec, out):
    n = args.n if args.n is not None else spec.get("n", 100_000)
    seed = args.seed
    if seed is None:
        seed = spec.get("seed", int(os.environ.get(SEED_ENV, "0")))
    weights = args.weights if args.weights is not None else spec.get("weights", [1, 1, 1, 1])
    label = args.strategy or spec.get("strategy")
    if label:
        source = lhv.strategy_tables(_parse_strategy(label))
        origin = {"strategy": label}
    else:
        solution = hardy.solve_hardy(_config_from(args, spec))
        source = solution
        origin = {"config": solution.config.to_dict()}
    log = events.sample_events(source, n, seed, weights)
    if args.events_csv:
        with open(args.events_csv, "w", newline="") as fh:
            log.write_csv(fh)
    payload = dict(origin)
    payload.update(events.summary(log))
    _emit(_dump(payload), args.output, out)


def cmd_lhv(args, spec, out):
    audit = lhv.verify_ch_total_all()
    strategy, report = lhv.find_postselected_violation()
    _, total = bell.ch_reports(lhv.strategy_tables(strategy), source="lhv")
    payload = {
        "vertices": audit.to_dict(),
        "postselection_exhibit": {
            "strategy": strategy.to_dict(),
            "ch_postselected": report.to_dict(),
            "ch_total": total.to_dict(),
        },
    }
    _emit(_dump(payload), args.output, out)


def cmd_ifm(args, spec, out):
    if args.grid:
        grid = np.linspace(0.0, 1.0, args.grid)
        rows = ifm.sweep(grid.tolist(), grid.tolist())
        _emit(ifm.sweep_csv(rows), args.output, out)
        return
    u = args.u if args.u is not None else spec.get("u")
    r2 = args.r2 if args.r2 is not None else spec.get("r2")
    if u is None or r2 is None:
        raise DomainError("ifm needs --u and --r2 (or --grid)")
    _emit(_dump(ifm.ifm_efficiency(u, r2).to_dict()), args.output, out)


def sweep_rows(resolution: int):
    """Feasible grid points of the (t1', r2') square with u' = 1."""
    grid = np.linspace(0.0, 1.0, resolution)
    for t in grid.tolist():
        for r in grid.tolist():
            if t * t + r * r < 1.0 - hardy.TOL:
                continue
            sol = hardy.solve_hardy(hardy.HardyConfiguration(t, r))
            post, total = bell.ch_reports(sol.tables(), source="closed-form")
            u2 = sol.u**2
            simplified = (t * r) ** 2 * (1.0 - u2) if abs(u2 - 1.0) > bell.VIOLATION_TOL else math.nan
            yield (t, r, u2, sol.hardy_probability, post.margin, total.margin, simplified)


def cmd_sweep(args, spec, out):
    resolution = args.resolution if args.resolution is not None else spec.get("resolution", 101)
    if resolution < 2:
        raise DomainError("resolution must be >= 2")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in sweep_rows(resolution):
        writer.writerow([repr(float(x)) for x in row])
    _emit(buf.getvalue(), args.output, out)


def _weights(text: str):
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("weights need four comma-separated numbers")
    return parts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardy-postselect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="experiment spec JSON (a solve output also works)")
        p.add_argument("--q", type=float, help="t1' = r2' = q")
        p.add_argument("--q2", type=float, help="t1' = r2' = sqrt(q2)")
        p.add_argument("--t1p", type=float)
        p.add_argument("--r2p", type=float)
        p.add_argument("--u1p", type=float, help="absorber amplitude under Phi2' (default 1)")
        p.add_argument("--phi0", type=float, help="free phase phi2' (default 0)")
        p.add_argument("--n1", type=int)
        p.add_argument("--n2", type=int)
        p.add_argument("--n3", type=int)

    def add_output(p):
        p.add_argument("-o", "--output", help="write to file instead of stdout")

    p = sub.add_parser("solve", help="solve the Hardy constraints")
    add_config(p)
    add_output(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("probs", help="joint probability tables for the four setting pairs")
    add_config(p)
    add_output(p)
    p.add_argument("--oracle", action="store_true", help="use amplitude propagation instead of closed forms")
    p.set_defaults(func=cmd_probs)

    p = sub.add_parser("audit", help="analytic Bell/CH/CHSH reports")
    add_config(p)
    add_output(p)
    p.add_argument("--oracle", action="store_true")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sample", help="Monte Carlo events and empirical audit")
    add_config(p)
    add_output(p)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, help=f"default: ${SEED_ENV} or 0")
    p.add_argument("--weights", type=_weights, help="setting-pair weights 'w12,w12p,w1p2,w1p2p'")
    p.add_argument("--strategy", help="sample a local strategy such as 'LU|AU' instead")
    p.add_argument("--events-csv", help="write the event log here")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("lhv", help="enumerate deterministic local strategies")
    add_output(p)
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_lhv)

    p = sub.add_parser("ifm", help="interaction-free measurement efficiency")
    add_output(p)
    p.add_argument("--config")
    p.add_argument("--u", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--grid", type=int, help="CSV sweep over a grid of u and r2 in [0, 1]")
    p.set_defaults(func=cmd_ifm)

    p = sub.add_parser("sweep", help="CSV of Hardy probability and CH margins over (t1', r2')")
    add_output(p)
    p.add_argument("--config")
    p.add_argument("--resolution", type=int)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = load_spec(getattr(args, "config", None))
        args.func(args, spec, out)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_DATA
    except (HardyError, jsonschema.ValidationError, json.JSONDecodeError, OSError) as exc:
        msg = exc.message if isinstance(exc, jsonschema.ValidationError) else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
