"""Command line: ``blrefine {analyze,bound,threshold,verify-paper}``.

Exit codes: 0 pass, 1 a verified failure (bound violated, invalid bracket,
exhausted sequence, failed claim), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .algebra import Polynomial, as_fraction
from .bounds import SANDWICH_MAX_DEGREE
from .potential import PotentialError, potential_from_json
from .refinement import A_WEIGHTS, SequenceExhausted, bl_reverse_condition, build_sequence
from .thresholds import FAMILIES, InvalidBracket, positivity_threshold, sweep

log = logging.getLogger("blrefine")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
OUTPUTS = ("json", "table", "csv")

# keys a --config file may set; flags given on the command line win
CONFIG_KEYS = ("potential", "f", "depth", "tol", "family", "n", "bracket", "a", "output", "out", "only", "sweep")


class UsageError(ValueError):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with defaults for any flag")
    p.add_argument("--output", choices=OUTPUTS, default=None)
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blrefine", description="Iterated Brascamp-Lieb variance bounds")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="build E_1..E_n with positivity certificates")
    p.add_argument("--potential", help="JSON file or inline JSON")
    p.add_argument("--depth", type=int)
    _common(p)

    p = sub.add_parser("bound", help="alternating variance bounds for a test function")
    p.add_argument("--potential")
    p.add_argument("--f", help='coefficients, lowest first, e.g. \'["0","0","0","1"]\'')
    p.add_argument("--depth", type=int)
    p.add_argument("--tol", type=float)
    _common(p)

    p = sub.add_parser("threshold", help="bisect a family parameter for positivity of E_{n+1}")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--bracket", help="lo,hi (exact rationals allowed)")
    p.add_argument("--a", help="quadratic coefficient of the quartic family")
    p.add_argument("--tol", type=float)
    p.add_argument("--sweep", help="lo,hi,steps: emit the positivity bit on a grid instead")
    _common(p)

    p = sub.add_parser("verify-paper", help="run every reproducible claim")
    p.add_argument("--only", action="append", help="run claims whose name contains this")
    p.add_argument("--mutate-A", dest="mutate_a", help=argparse.SUPPRESS)
    _common(p)
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(data) - set(CONFIG_KEYS) - {"command"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "verbose"):
            cfg[key] = value
    cfg.setdefault("output", "json")
    return cfg


def _load_potential(spec):
    if spec is None:
        raise UsageError("--potential is required")
    try:
        return potential_from_json(spec if not isinstance(spec, dict) else dict(spec))
    except (PotentialError, json.JSONDecodeError, ValueError, TypeError) as exc:
        raise UsageError(f"bad potential: {exc}") from exc


def _load_poly(spec) -> Polynomial:
    if spec is None:
        raise UsageError("--f is required for bound")
    try:
        data = json.loads(spec) if isinstance(spec, str) else spec
        if any(isinstance(c, float) for c in data):
            raise ValueError("floats are not accepted; use strings like '1/2'")
        return Polynomial.from_json(data)
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise UsageError(f"bad f: {exc}") from exc


def _positive_int(cfg: dict, key: str, default: Optional[int] = None) -> int:
    v = cfg.get(key, default)
    if v is None:
        raise UsageError(f"--{key} is required")
    if not isinstance(v, int) or v < 1:
        raise UsageError(f"--{key} must be an integer >= 1")
    return v


def _tol(cfg: dict, default: float) -> float:
    tol = float(cfg.get("tol", default))
    if not tol > 0:
        raise UsageError("--tol must be positive")
    return tol


def _fractions(text, count: Optional[int] = None) -> list:
    parts = text if isinstance(text, list) else str(text).split(",")
    try:
        out = [as_fraction(p.strip() if isinstance(p, str) else p) for p in parts]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"bad number list {text!r}: {exc}") from exc
    if count is not None and len(out) != count:
        raise UsageError(f"expected {count} comma-separated values, got {text!r}")
    return out


# -- report emission --------------------------------------------------------


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _table(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    cells = [[str(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _emit(cfg: dict, payload, rows: list[dict], footer: str = "") -> None:
    fmt = cfg["output"]
    if fmt == "json":
        text = _dump_json(payload)
    elif fmt == "csv":
        text = _csv(rows)
    else:
        text = _table(rows) + footer
    if cfg.get("out"):
        Path(cfg["out"]).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands ------------------------------------------------------------


def cmd_analyze(cfg: dict) -> int:
    pot = _load_potential(cfg.get("potential"))
    depth = _positive_int(cfg, "depth", 4)
    try:
        seq = build_sequence(pot, depth, max_degree=SANDWICH_MAX_DEGREE)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    expr, cert = bl_reverse_condition(pot)
    payload = {
        "potential": pot.to_json(),
        "depth": depth,
        "sequence": seq.to_json(),
        "reverse_bl": {**expr.to_json(), "certificate": cert.to_json()},
    }
    rows = [{"n": n, "E_n": str(E), "positive": c.positive,
             "witness": "" if c.witness is None else c.witness}
            for n, (E, c) in enumerate(zip(seq.E, seq.certs), 1)]
    footer = f"\ntruncation: {seq.truncation}\nreverse BL condition positive: {cert.positive}\n"
    _emit(cfg, payload, rows, footer)
    return EXIT_OK


def cmd_bound(cfg: dict) -> int:
    from .bounds import sandwich_check

    pot = _load_potential(cfg.get("potential"))
    f = _load_poly(cfg.get("f"))
    depth = _positive_int(cfg, "depth", 3)
    tol = _tol(cfg, 1e-8)
    try:
        rep = sandwich_check(f, pot, depth, tol)
    except SequenceExhausted as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    rows = [{"n": n, "term": t.value, "err": t.abs_error_estimate, "partial_sum": s, "verdict": v}
            for n, (t, s, v) in enumerate(zip(rep.terms, rep.partial_sums, rep.verdicts), 1)]
    footer = f"\nvariance: {rep.variance.value!r}\npass: {rep.passed}\n"
    _emit(cfg, rep.to_json(), rows, footer)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_threshold(cfg: dict) -> int:
    family = cfg.get("family")
    if family not in FAMILIES:
        raise UsageError(f"--family must be one of {FAMILIES}")
    n = _positive_int(cfg, "n", 1)
    a = _fractions(cfg.get("a", "1"), 1)[0]
    if cfg.get("sweep"):
        lo, hi, steps = _fractions(cfg["sweep"], 3)
        if steps.denominator != 1 or steps < 2:
            raise UsageError("sweep steps must be an integer >= 2")
        grid = [lo + (hi - lo) * Fraction(k, int(steps) - 1) for k in range(int(steps))]
        try:
            rows = sweep(family, n, grid, a)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        _emit(cfg, {"family": family, "n": n, "rows": rows}, rows)
        return EXIT_OK
    bracket = _fractions(cfg["bracket"], 2) if cfg.get("bracket") else None
    tol = _tol(cfg, 1e-8)
    try:
        res = positivity_threshold(family, n, bracket, tol, a)
    except InvalidBracket as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = [{"family": family, "n": n, "t_star": res.t_star, "normalized": res.normalized,
             "below_positive": res.cert_below.positive, "above_positive": res.cert_above.positive}]
    _emit(cfg, res.to_json(), rows)
    return EXIT_OK


def cmd_verify_paper(cfg: dict) -> int:
    from .claims import verify_paper

    weights = A_WEIGHTS
    if cfg.get("mutate_a"):
        weights = tuple(_fractions(cfg["mutate_a"], 4))
    only = cfg.get("only")
    if isinstance(only, str):
        only = [only]
    results = verify_paper(only, weights=weights)
    if not results:
        raise UsageError(f"--only {only} matched no claim")
    ok = all(r.passed for r in results)
    rows = [{"#": r.index, "claim": r.name, "result": "PASS" if r.passed else "FAIL",
             "seconds": f"{r.seconds:.2f}", "anchor": r.anchor} for r in results]
    payload = {"pass": ok, "claims": [r.to_json() for r in results]}
    if cfg["output"] == "csv":
        rows = [{k: v for k, v in row.items() if k != "seconds"} for row in rows]
    _emit(cfg, payload, rows, f"\n{sum(r.passed for r in results)}/{len(results)} claims pass\n")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "analyze": cmd_analyze,
    "bound": cmd_bound,
    "threshold": cmd_threshold,
    "verify-paper": cmd_verify_paper,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _merge_config(args)
        if cfg["output"] not in OUTPUTS:
            raise UsageError(f"--output must be one of {OUTPUTS}")
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
