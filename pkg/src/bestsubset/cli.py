"""Command-line interface.

Subcommands: analyze (confidence subset from counts or scores), simulate
(coverage experiments), baselines (rank tests), moments (coefficient tables).
Machine-readable JSON goes to stdout, human diagnostics to stderr.  Exit
codes: 0 success, 2 input/validation error, 1 internal numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from . import baselines, bounds, ingest, moments, simulate
from .subset import WinCounts, mle, select_subset

SCHEMA_VERSION = 1
_THREADS_ENV = "BEST_SUBSET_THREADS"


@dataclass(frozen=True)
class RunConfig:
    """Validated knobs shared by the analysis commands."""

    delta: float = 0.05
    method: str = "finite"
    m: int | str = "auto"
    delta_split: float = 0.9
    seed: int = 0


def _threads() -> int:
    raw = os.environ.get(_THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{_THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{_THREADS_ENV} must be at least 1")
    return value


def _parse_m(raw: str) -> int | str:
    if raw == "auto":
        return "auto"
    try:
        return int(raw)
    except ValueError:
        raise ValueError("--m must be 'auto' or an even integer >= 2") from None


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _note(message: str) -> None:
    sys.stderr.write(message + "\n")


def _parse_distribution(descriptor: str, seed: int):
    """'zipf:s=1,A=20' or 'simplex:A=20' into a Distribution."""
    name, _, rest = descriptor.partition(":")
    params: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq or not key.strip():
                raise ValueError(f"malformed distribution parameter {item!r}")
            params[key.strip()] = value.strip()
    try:
        if name == "zipf":
            s = float(params.pop("s", "1"))
            a = int(params.pop("A"))
        elif name == "simplex":
            a = int(params.pop("A"))
        else:
            raise ValueError(f"unknown distribution {name!r} (use zipf or simplex)")
    except KeyError as exc:
        raise ValueError(f"distribution {name!r} is missing parameter {exc}") from None
    if params:
        raise ValueError(f"unknown distribution parameters {sorted(params)}")
    if name == "zipf":
        return simulate.zipf_distribution(s, a)
    return simulate.uniform_simplex(a, seed)


def _load_counts(args) -> tuple[WinCounts, dict]:
    """Counts plus a tie-resolution audit record (empty for direct counts)."""
    if args.counts and args.scores:
        raise ValueError("pass either --counts or --scores, not both")
    if args.counts:
        return ingest.parse_counts_csv(args.counts), {}
    if args.scores:
        matrix = ingest.parse_scores_csv(args.scores, args.direction)
        wins = ingest.wins_from_scores(matrix, args.tie_policy, args.tie_seed)
        audit = {
            "tie_policy": args.tie_policy,
            "tie_seed": args.tie_seed,
            "direction": matrix.direction,
            "dropped_rows": matrix.dropped_rows,
        }
        return wins, audit
    raise ValueError("one of --counts or --scores is required")


def cmd_analyze(args) -> int:
    cfg = RunConfig(
        delta=args.delta,
        method=args.method,
        m=_parse_m(args.m),
        delta_split=args.delta_split,
        seed=args.tie_seed,
    )
    counts, audit = _load_counts(args)
    sub = select_subset(
        counts, cfg.delta, cfg.method, m=cfg.m, delta_split=cfg.delta_split
    )
    wr = sub.width_result
    p_hat = mle(counts)

    diagnostics = dict(wr.diagnostics)
    if args.m_scan and cfg.method == "finite":
        scan = {}
        d1 = cfg.delta_split * cfg.delta
        d2 = cfg.delta - d1
        for mm in (2, 4, 6, 8, 10, 12):
            scan[str(mm)] = 2.0 * bounds.data_dependent_width(
                p_hat, counts.n, d1, d2, mm
            ).width
        diagnostics["m_scan"] = scan

    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "analyze",
        "seed": args.tie_seed if args.scores else None,
        "delta": cfg.delta,
        "method": cfg.method,
        "labels": list(counts.labels),
        "counts": list(counts.counts),
        "n": counts.n,
        "p_hat": [c / counts.n for c in counts.counts],
        "m_used": wr.m_used,
        "delta_1": wr.delta_1,
        "delta_2": wr.delta_2,
        "epsilon_n": wr.epsilon_n,
        "width": sub.width,
        "vacuous": sub.vacuous,
        "argmax_set": list(sub.argmax_set),
        "subset": list(sub.members),
        "subset_size": len(sub.members),
        "tie_resolution": audit or None,
        "diagnostics": diagnostics,
    }
    if args.plot:
        from . import plots

        payload["plot"] = plots.analysis_figure(counts, sub, args.plot)
    _emit(payload)
    _note(
        f"selected {len(sub.members)} of {counts.alphabet_size} symbols; "
        f"width {sub.width:.6g} ({cfg.method}, delta {cfg.delta:.6g})"
    )
    return 0


def cmd_simulate(args) -> int:
    if not 0.0 < args.delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    dist = _parse_distribution(args.dist, args.seed)
    n_grid = [int(x) for x in args.n_grid.split(",") if x.strip()]
    methods = tuple(x.strip() for x in args.methods.split(",") if x.strip())
    threads = _threads()
    report = simulate.coverage_experiment(
        dist,
        n_grid,
        args.delta,
        methods=methods,
        reps=args.reps,
        seed=args.seed,
        m=_parse_m(args.m),
        delta_split=args.delta_split,
        oracle_reps=args.oracle_reps,
        threads=threads,
        descriptor=args.dist,
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "seed": args.seed,
        **report.to_json_dict(),
        "plot_data": args.plot_data,
        "plot": args.plot,
    }
    if args.plot_data:
        with open(args.plot_data, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    if args.plot:
        from . import plots

        plots.coverage_figure(report, args.plot)
    _emit(payload)
    worst = min(
        (r for r in report.rows if r.method == "finite"),
        key=lambda r: r.coverage,
        default=None,
    )
    if worst is not None:
        _note(
            f"finite-method coverage at worst grid point: {worst.coverage:.6g} "
            f"(n = {worst.n}, target {1.0 - args.delta:.6g})"
        )
    return 0


def cmd_baselines(args) -> int:
    if not 0.0 < args.delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    if not args.scores and not args.counts:
        raise ValueError("one of --scores or --counts is required")
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "baselines",
        "seed": None,
        "delta": args.delta,
        "friedman": None,
        "nemenyi": None,
        "rank_verification": None,
    }
    if args.scores:
        matrix = ingest.parse_scores_csv(args.scores, args.direction)
        ranks = ingest.ranks_from_scores(matrix)
        payload["friedman"] = friedman = baselines.friedman_test(ranks, args.delta)
        if math.isinf(friedman["iman_F"]):
            friedman["iman_F"] = "inf"
        payload["nemenyi"] = nem = baselines.nemenyi_cd(
            ranks.alphabet_size, ranks.n, args.delta, ranks=ranks
        )
        nem["decisions"] = [
            {"pair": list(d["pair"]), "rank_diff": d["rank_diff"], "significant": d["significant"]}
            for d in nem["decisions"]
        ]
    if args.counts:
        counts = ingest.parse_counts_csv(args.counts)
        chain = baselines.rank_verification(counts, args.delta)
        payload["rank_verification"] = {
            "comparisons": [
                {
                    "labels": list(c.labels),
                    "counts": list(c.counts),
                    "p_value": c.p_value,
                    "reject": c.reject,
                }
                for c in chain.comparisons
            ],
            "verified_prefix_length": chain.verified_prefix_length,
        }
    _emit(payload)
    if payload["rank_verification"] is not None:
        _note(
            "verified ranking prefix length: "
            f"{payload['rank_verification']['verified_prefix_length']}"
        )
    if payload["friedman"] is not None:
        _note(f"Friedman/Iman p-value: {payload['friedman']['iman_p']:.6g}")
    return 0


def cmd_moments(args) -> int:
    if args.m % 2 != 0 or args.m < 2:
        raise ValueError("--m must be an even integer >= 2")
    coeffs = moments.coefficients(args.m, args.n)
    flags = moments.coefficient_bound_flags(args.m, args.n)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "moments",
        "seed": None,
        "m": args.m,
        "n": args.n,
        "coefficients": coeffs,
        "bound_checks": [
            {"k": k, "holds": bool(flag)} for k, flag in enumerate(flags, start=1)
        ],
        "evaluation": None,
    }
    if args.theta is not None:
        if not 0.0 <= args.theta <= 1.0:
            raise ValueError("--theta must lie in [0, 1]")
        payload["evaluation"] = {
            "theta": args.theta,
            "value": float(moments.eval_central_moment(args.m, args.n, args.theta)),
        }
    _emit(payload)
    _note(f"{len(coeffs)} coefficients for m = {args.m}, n = {args.n}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="best-subset",
        description="Confidence subsets for the most frequent symbol.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    pa = sub.add_parser("analyze", help="confidence subset from counts or scores")
    pa.add_argument("--counts", help="CSV with header algorithm,count")
    pa.add_argument("--scores", help="CSV with header dataset,<alg1>,<alg2>,...")
    pa.add_argument(
        "--direction",
        choices=("higher_better", "lower_better"),
        default="higher_better",
    )
    pa.add_argument(
        "--tie-policy",
        choices=("random", "first", "all_fractional_rounded"),
        default="random",
    )
    pa.add_argument("--tie-seed", type=int, default=0)
    pa.add_argument("--delta", type=float, default=0.05)
    pa.add_argument("--method", choices=("finite", "asymptotic"), default="finite")
    pa.add_argument("--m", default="auto", help="'auto' or an even integer >= 2")
    pa.add_argument("--delta-split", type=float, default=0.9)
    pa.add_argument(
        "--m-scan",
        action="store_true",
        help="report widths for m in 2..12 as a diagnostic (selection unchanged)",
    )
    pa.add_argument("--plot", help="write a frequency/threshold figure (PNG)")
    pa.set_defaults(func=cmd_analyze)

    ps = sub.add_parser("simulate", help="coverage and subset-size experiment")
    ps.add_argument("--dist", required=True, help="zipf:s=1,A=20 or simplex:A=20")
    ps.add_argument("--n-grid", required=True, help="comma-separated sample sizes")
    ps.add_argument("--reps", type=int, default=1000)
    ps.add_argument("--methods", default="finite,asymptotic")
    ps.add_argument("--delta", type=float, default=0.05)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--m", default="auto")
    ps.add_argument("--delta-split", type=float, default=0.9)
    ps.add_argument("--oracle-reps", type=int, default=100_000)
    ps.add_argument("--plot-data", help="write the per-row results as CSV")
    ps.add_argument("--plot", help="write a coverage/size figure (PNG)")
    ps.set_defaults(func=cmd_simulate)

    pb = sub.add_parser("baselines", help="rank tests and verification chain")
    pb.add_argument("--scores", help="score matrix CSV for Friedman/Nemenyi")
    pb.add_argument(
        "--direction",
        choices=("higher_better", "lower_better"),
        default="higher_better",
    )
    pb.add_argument("--counts", help="win-count CSV for the verification chain")
    pb.add_argument("--delta", type=float, default=0.05)
    pb.set_defaults(func=cmd_baselines)

    pm = sub.add_parser("moments", help="central-moment coefficient table")
    pm.add_argument("--m", type=int, required=True)
    pm.add_argument("--n", type=int, required=True)
    pm.add_argument("--theta", type=float, default=None)
    pm.set_defaults(func=cmd_moments)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        _note(f"error: {exc}")
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        _note(f"internal error: {type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
