"""benfrag: one executable over the fragmentation, Benford, Mellin, and
sweep machinery.

Exit codes: 0 success, 1 validation error (single line on stderr),
2 numerical failure. Identical invocations produce byte-identical output
files; --threads changes wall time only.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__, benford, density, harness, mellin
from .fragmentation import FragConfig, fragment_full, fragment_sample, log10_contents, closed_form_leaf, cut_sequence
from .output import dumps_json, fmt, write_csv, write_json
from .quadrature import QuadratureError
from .rng import RngSpec


class CliError(Exception):
    """Invalid invocation or configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1, not argparse's 2
        raise CliError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="override the stream seed")
    parser.add_argument("--stream", type=int, default=None, help="override the stream id")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads; affects wall time only, never output bytes")
    parser.add_argument("--out", default=None, help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output encoding (default per subcommand)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="benfrag", description=__doc__)
    parser.add_argument("--version", action="version", version=f"benfrag {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fragment", help="run one fragmentation and dump the pieces")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int, required=True, dest="n_iter")
    p.add_argument("--density", default='{"kind":"uniform"}', help="density JSON")
    p.add_argument("--mode", choices=("full", "sample"), default="full")
    p.add_argument("--leaves", type=int, default=None, help="leaf count in sample mode")
    p.add_argument("--edges", default=None, help="comma-separated initial edge lengths")
    _add_common(p)

    p = sub.add_parser("analyze", help="significand statistics over a pieces CSV column")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--column", default="log10_volume")
    p.add_argument("--base", type=int, default=10)
    p.add_argument("--s-grid", type=int, default=64, dest="s_grid")
    _add_common(p)

    p = sub.add_parser("mellin", help="condition sum and error bound for a density")
    p.add_argument("--density", default='{"kind":"uniform"}', help="density JSON")
    p.add_argument("--base", type=int, default=10)
    p.add_argument("--factors", type=int, required=True)
    p.add_argument("--lmax", type=int, default=mellin.DEFAULT_LMAX)
    p.add_argument("--interval", default="0,1", help="a,b with 0 <= a <= b <= 1")
    p.add_argument("--csv", default=None, help="also export per-ell magnitudes to this CSV")
    _add_common(p)

    for name, help_text in (
        ("expectation", "trial means of P_N(s) across the N sweep"),
        ("variance", "across-trial variance of P_N(s); full mode only"),
        ("conjecture", "KS/chi-square trends of d-dimensional contents"),
        ("depprofile", "ordered-pair statistics by shared leading factors"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--plan", required=True, help="plan JSON file")
        _add_common(p)

    p = sub.add_parser("selftest", help="run the built-in oracle checks")
    _add_common(p)
    return parser


def _parse_edges(spec: str | None) -> tuple[float, ...] | None:
    if spec is None:
        return None
    try:
        return tuple(float(v) for v in spec.split(","))
    except ValueError as exc:
        raise CliError(f"bad --edges value: {exc}") from None


def _parse_interval(spec: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in spec.split(","))
    except ValueError:
        raise CliError(f"bad --interval value {spec!r}; expected a,b") from None
    return a, b


def _emit(args, default_format: str, header: Sequence[str],
          rows: Sequence[Sequence[Any]], json_obj: Any) -> None:
    encoding = args.format or default_format
    if args.out is None:
        if encoding == "csv":
            sys.stdout.write(",".join(header) + "\n")
            for row in rows:
                sys.stdout.write(",".join(fmt(v) for v in row) + "\n")
        else:
            sys.stdout.write(dumps_json(json_obj) + "\n")
    elif encoding == "csv":
        write_csv(args.out, header, rows)
    else:
        write_json(args.out, json_obj)


def _load_plan(args) -> harness.ExperimentPlan:
    with open(args.plan) as fh:
        obj = json.load(fh)
    if args.seed is not None:
        obj["seed"] = args.seed
    if args.stream is not None:
        obj["stream"] = args.stream
    return harness.plan_from_config(obj)


def _cmd_fragment(args) -> int:
    d = density.from_config(args.density)
    rng = RngSpec(args.seed if args.seed is not None else 0,
                  args.stream if args.stream is not None else 0)
    cfg = FragConfig(m=args.m, n_iter=args.n_iter, density=d, rng=rng,
                     initial_edges=_parse_edges(args.edges),
                     mode=args.mode, leaves=args.leaves)
    pieces = fragment_full(cfg) if cfg.mode == "full" else fragment_sample(cfg)
    m = cfg.m
    contents = [10.0 ** log10_contents(pieces.log_edges, dim) for dim in range(1, m + 1)]
    header = (["path", "log10_volume"]
              + [f"edge_{i}" for i in range(1, m + 1)]
              + [f"c_{i}" for i in range(1, m + 1)])
    log_volumes = pieces.log_volumes
    rows = []
    for i in range(len(pieces)):
        rows.append([format(int(pieces.paths[i]), f"0{pieces.depth}b"), log_volumes[i]]
                    + [pieces.log_edges[i, a] for a in range(m)]
                    + [contents[dim][i] for dim in range(m)])
    json_obj = [dict(zip(header, [r[0]] + [float(v) for v in r[1:]])) for r in rows]
    _emit(args, "csv", header, rows, json_obj)
    return 0


def _cmd_analyze(args) -> int:
    values = _read_csv_column(args.infile, args.column)
    grid = benford.default_s_grid(args.base, args.s_grid)
    stats = benford.proportion_curve(values, args.base, grid)
    ks = stats.ks()
    chi, dof = benford.chi_square_digits(values, args.base)
    law = benford.digit_law(args.base)
    json_obj = {
        "base": args.base,
        "count": stats.count,
        "digit_counts": [int(c) for c in stats.digit_counts],
        "digit_law": [float(v) for v in law],
        "ks": ks,
        "chi_square": chi,
        "chi_square_dof": dof,
        "curve": [[float(s), float(p), float(t)] for s, p, t in stats.curve],
    }
    header = ["s", "P_of_s", "log_base_s"]
    rows = [[float(s), float(p), float(t)] for s, p, t in stats.curve]
    _emit(args, "json", header, rows, json_obj)
    return 0


def _read_csv_column(path: str, column: str) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if column not in header:
            raise CliError(f"column {column!r} not found in {path}")
        idx = header.index(column)
        values = [float(line.rstrip("\n").split(",")[idx]) for line in fh if line.strip()]
    if not values:
        raise CliError(f"no rows in {path}")
    return np.asarray(values)


def _cmd_mellin(args) -> int:
    d = density.from_config(args.density)
    interval = _parse_interval(args.interval)
    report = mellin.condition_sum(d, args.factors, args.base, args.lmax)
    bound = mellin.expectation_error_bound(d, args.factors, args.base, interval, args.lmax)
    json_obj = {
        "density": report.density,
        "base": report.base,
        "factors": report.factors,
        "lmax": report.lmax,
        "symmetrized": report.symmetrized,
        "condition_sum": report.condition_sum,
        "tail_estimate": report.tail_estimate,
        "interval": [interval[0], interval[1]],
        "error_bound": bound,
    }
    if args.csv:
        header = ["ell", "magnitude", "magnitude_pow_n"]
        rows = [[ell, float(mag), float(mag) ** args.factors]
                for ell, mag in enumerate(report.magnitudes, start=1)]
        write_csv(args.csv, header, rows)
    _emit(args, "json", [], [], json_obj)
    return 0


_SWEEP_HEADER = ["m", "N", "s", "trials", "mean_P", "var_P",
                 "theory_log10_s", "mellin_bound", "abs_error"]


def _sweep_output(rows: list[harness.ConvergenceRow]):
    table = [[r.m, r.n_iter, r.s, r.trials, r.mean_p, r.var_p, r.theory, r.bound, r.abs_error]
             for r in rows]
    json_obj = [{
        "m": r.m, "N": r.n_iter, "s": r.s, "trials": r.trials,
        "mean_P": r.mean_p, "var_P": r.var_p, "theory_log10_s": r.theory,
        "mellin_bound": r.bound, "abs_error": r.abs_error, "note": r.note,
    } for r in rows]
    return table, json_obj


def _cmd_expectation(args) -> int:
    plan = _load_plan(args)
    rows = harness.run_expectation(plan, threads=args.threads)
    for r in rows:
        if r.note:
            print(f"benfrag: note: N={r.n_iter} s={r.s}: {r.note}", file=sys.stderr)
    table, json_obj = _sweep_output(rows)
    _emit(args, "csv", _SWEEP_HEADER, table, json_obj)
    return 0


def _cmd_variance(args) -> int:
    plan = _load_plan(args)
    rows = harness.run_variance(plan, threads=args.threads)
    for r in rows:
        if r.note:
            print(f"benfrag: note: N={r.n_iter} s={r.s}: {r.note}", file=sys.stderr)
    table, json_obj = _sweep_output(rows)
    _emit(args, "csv", _SWEEP_HEADER, table, json_obj)
    return 0


def _cmd_conjecture(args) -> int:
    plan = _load_plan(args)
    rows = harness.run_conjecture(plan, threads=args.threads)
    header = ["m", "d", "N", "count", "ks", "chi_square", "monotone_flag"]
    table = [[r.m, r.d, r.n_iter, r.count, r.ks, r.chi_square, r.monotone] for r in rows]
    json_obj = [{
        "m": r.m, "d": r.d, "N": r.n_iter, "count": r.count,
        "ks": r.ks, "chi_square": r.chi_square, "monotone_flag": bool(r.monotone),
    } for r in rows]
    _emit(args, "csv", header, table, json_obj)
    return 0


def _cmd_depprofile(args) -> int:
    plan = _load_plan(args)
    header = ["m", "N", "s", "mu", "pair_count", "mean_phi_product", "reference",
              "cutoff_M", "high_fraction", "expected_high_fraction", "exact"]
    table: list[list[Any]] = []
    json_obj: list[dict[str, Any]] = []
    for n_iter in plan.n_sweep:
        cfg = plan.frag_config(n_iter, 0)
        pieces = fragment_full(cfg)
        for s in plan.s_values:
            profile = harness.dependency_profile(pieces, s, plan.base)
            for row in profile.rows:
                table.append([plan.m, n_iter, s, row.shared, row.pair_count,
                              row.mean_phi_product, row.reference, profile.cutoff,
                              profile.high_fraction, profile.expected_high_fraction,
                              profile.exact])
                json_obj.append({
                    "m": plan.m, "N": n_iter, "s": s, "mu": row.shared,
                    "pair_count": row.pair_count,
                    "mean_phi_product": row.mean_phi_product,
                    "reference": row.reference, "cutoff_M": profile.cutoff,
                    "high_fraction": profile.high_fraction,
                    "expected_high_fraction": profile.expected_high_fraction,
                    "exact": profile.exact,
                })
    _emit(args, "csv", header, table, json_obj)
    return 0


def _cmd_selftest(args) -> int:
    checks: list[tuple[str, bool, str]] = []

    # Closed-form leaf products against full enumeration.
    ok = True
    detail = ""
    for m in (1, 2, 3):
        for n in (1, 2):
            cfg = FragConfig(m=m, n_iter=n, density=density.uniform(), rng=RngSpec(7, m * 10 + n))
            cuts = cut_sequence(cfg)
            pieces = fragment_full(cfg)
            for piece in pieces:
                direct = closed_form_leaf(cfg, cuts, piece.path)
                rel = abs(10.0 ** piece.log_volume - direct) / direct
                if rel > 1e-12:
                    ok, detail = False, f"m={m} N={n} path={piece.path} rel={rel:g}"
                    break
    checks.append(("closed-form leaves match full enumeration", ok, detail))

    # Volume conservation.
    cfg = FragConfig(m=2, n_iter=3, density=density.uniform(), rng=RngSpec(11, 0),
                     initial_edges=(2.0, 0.5))
    pieces = fragment_full(cfg)
    total = float(np.sum(10.0 ** pieces.log_volumes))
    rel = abs(total - cfg.initial_volume()) / cfg.initial_volume()
    checks.append(("piece volumes sum to the initial volume", rel < 1e-9, f"rel={rel:g}"))

    # Uniform Mellin transform: quadrature path against the closed form.
    worst = 0.0
    for ell in range(-10, 11):
        if ell == 0:
            continue
        gap = abs(mellin.mellin_quadrature(density.uniform(), ell, 10)
                  - mellin.analytic_uniform(ell, 10))
        worst = max(worst, gap)
    checks.append(("uniform Mellin quadrature matches the closed form", worst < 1e-8,
                   f"worst gap={worst:g}"))

    # Digit law telescopes to 1.
    gap = abs(float(np.sum(benford.digit_law(10))) - 1.0)
    checks.append(("digit law sums to 1", gap < 1e-12, f"gap={gap:g}"))

    failed = False
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}" + (f" ({detail})" if detail and not passed else ""))
        failed |= not passed
    return 2 if failed else 0


_COMMANDS = {
    "fragment": _cmd_fragment,
    "analyze": _cmd_analyze,
    "mellin": _cmd_mellin,
    "expectation": _cmd_expectation,
    "variance": _cmd_variance,
    "conjecture": _cmd_conjecture,
    "depprofile": _cmd_depprofile,
    "selftest": _cmd_selftest,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"benfrag: error: {exc}", file=sys.stderr)
        return 1
    except (QuadratureError, FloatingPointError) as exc:
        print(f"benfrag: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"benfrag: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
