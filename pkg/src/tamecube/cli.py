"""Command-line entry point: verification suites, map sampling, schema version.

Exit codes: 0 all properties pass, 1 a property failed, 2 usage or parse
error, 3 I/O error.  Reports are JSON with sorted keys; the timestamp
lives in its own field so byte comparison modulo that field is stable
across runs with the same seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .cubes import CubicalComplex, boundary_complex, full_cube, j_complex, skeleton
from .errors import TameCubeError
from .maps import parse_map
from .suites import SuiteConfig, report_schema_version, run_suite

__all__ = ["main", "console_main", "parse_complex_descriptor"]


def parse_complex_descriptor(text: str) -> CubicalComplex:
    """Complex descriptors: ``full:n``, ``boundary:n``, ``J:n``, ``skeleton:<desc>:<j>``.

    The skeleton form nests: ``skeleton:boundary:3:1`` is the 1-skeleton of
    the boundary of the 3-cube.
    """
    text = text.strip()
    if text.startswith("skeleton:"):
        inner, _, j = text[len("skeleton:") :].rpartition(":")
        if not inner:
            raise ValueError(f"bad skeleton descriptor {text!r}")
        try:
            return skeleton(parse_complex_descriptor(inner), int(j))
        except ValueError as exc:
            raise ValueError(f"bad skeleton descriptor {text!r}: {exc}") from exc
    kind, _, num = text.partition(":")
    try:
        n = int(num)
    except ValueError as exc:
        raise ValueError(f"bad complex descriptor {text!r}") from exc
    if kind == "full":
        return full_cube(n)
    if kind == "boundary":
        return boundary_complex(n)
    if kind == "J":
        return j_complex(n)
    raise ValueError(f"unknown complex kind {kind!r} in {text!r}")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x)


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tamecube")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a named verification suite")
    verify.add_argument("--suite", required=True, help="suite name or 'all'")
    verify.add_argument("--n", default="1,2,3", help="comma-separated dimensions")
    verify.add_argument("--eps", default="0.1,0.25,0.4", help="comma-separated widths")
    verify.add_argument("--grid", type=int, default=33)
    verify.add_argument("--eq-tol", type=float, default=1e-9)
    verify.add_argument("--deriv-tol", type=float, default=1e-6)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", default=None, help="write the JSON report here")

    sample = sub.add_parser("sample", help="sample a map expression to CSV")
    sample.add_argument("--map", required=True, help="map expression or path to a file holding one")
    sample.add_argument("--grid", type=int, default=33)
    sample.add_argument("--out", required=True)

    sub.add_parser("schema", help="print the report schema version")
    return parser


def _cmd_verify(args) -> int:
    try:
        cfg = SuiteConfig(
            suite=args.suite,
            ns=_parse_ints(args.n),
            eps_list=_parse_floats(args.eps),
            grid_res=args.grid,
            eq_tol=args.eq_tol,
            deriv_tol=args.deriv_tol,
            seed=args.seed,
            out=args.out,
        )
    except (TameCubeError, ValueError) as exc:
        print(f"tamecube verify: {exc}", file=sys.stderr)
        return 2
    report = run_suite(cfg)
    report["timestamp"] = datetime.now(timezone.utc).isoformat()
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        try:
            Path(cfg.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"tamecube verify: cannot write report: {exc}", file=sys.stderr)
            return 3
    else:
        sys.stdout.write(text)
    return 0 if report["passed"] else 1


def _cmd_sample(args) -> int:
    source = args.map
    path = Path(source)
    try:
        if path.exists() and path.is_file():
            source = path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"tamecube sample: cannot read map file: {exc}", file=sys.stderr)
        return 3
    try:
        f = parse_map(source)
        if args.grid < 2:
            raise ValueError("grid must be at least 2")
    except (TameCubeError, ValueError) as exc:
        print(f"tamecube sample: {exc}", file=sys.stderr)
        return 2
    n, m = f.in_dim, f.out_dim
    axes = [np.linspace(0.0, 1.0, args.grid)] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    vals = f.eval_many(pts)
    header = ",".join([f"t{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, m + 1)])
    lines = [header]
    for row, val in zip(pts, vals):
        lines.append(",".join(f"{v:.17g}" for v in list(row) + list(val)))
    try:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    except OSError as exc:
        print(f"tamecube sample: cannot write CSV: {exc}", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "sample":
        return _cmd_sample(args)
    if args.command == "schema":
        print(report_schema_version())
        return 0
    return 2


def console_main() -> None:
    sys.exit(main())
