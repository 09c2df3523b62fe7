"""Coverage and subset-size experiments on synthetic distributions.

Every random draw is derived from a splittable seed tuple, never from global
state: replicate r of grid point n uses SeedSequence((seed, n, r)), and the
oracle calibration runs on its own stream.  Results are therefore identical
across runs, thread counts, and evaluation orders.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import baselines
from .subset import Distribution, LargeSampleAdvisory, WinCounts, select_subset

__all__ = [
    "CoverageRow",
    "CoverageReport",
    "zipf_distribution",
    "uniform_simplex",
    "sample_counts",
    "coverage_experiment",
]

_CSV_HEADER = "method,n,coverage,mean_size,se_coverage,se_size"
_ORACLE_STREAM = 1_000_003  # namespaces the calibration stream away from evaluation


@dataclass(frozen=True)
class CoverageRow:
    method: str
    n: int
    coverage: float
    mean_size: float
    se_coverage: float
    se_size: float


@dataclass(frozen=True)
class CoverageReport:
    """Aggregated coverage/size results for one distribution and delta."""

    rows: tuple[CoverageRow, ...]
    delta: float
    reps: int
    seed: int
    descriptor: str
    alphabet_size: int
    top_prob: float
    methods: tuple[str, ...]
    n_grid: tuple[int, ...]

    def to_csv(self) -> str:
        lines = [_CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.method},{r.n},{r.coverage!r},{r.mean_size!r},"
                f"{r.se_coverage!r},{r.se_size!r}"
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "delta": self.delta,
            "reps": self.reps,
            "seed": self.seed,
            "distribution": {
                "descriptor": self.descriptor,
                "alphabet_size": self.alphabet_size,
                "top_prob": self.top_prob,
            },
            "methods": list(self.methods),
            "n_grid": list(self.n_grid),
            "rows": [
                {
                    "method": r.method,
                    "n": r.n,
                    "coverage": r.coverage,
                    "mean_size": r.mean_size,
                    "se_coverage": r.se_coverage,
                    "se_size": r.se_size,
                }
                for r in self.rows
            ],
        }


def zipf_distribution(s: float, A: int) -> Distribution:
    """Power-law probabilities p_u proportional to u**(-s) for u = 1..A."""
    if not isinstance(A, int) or A < 1:
        raise ValueError("A must be a positive integer")
    if not np.isfinite(s) or s < 0:
        raise ValueError("s must be a finite non-negative real")
    w = np.arange(1, A + 1, dtype=float) ** (-float(s))
    w /= w.sum()
    return Distribution(tuple(float(x) for x in w))


def uniform_simplex(A: int, seed: int) -> Distribution:
    """One draw from the uniform distribution on the A-simplex.

    Normalised independent unit-rate exponentials; deterministic in seed.
    """
    if not isinstance(A, int) or A < 1:
        raise ValueError("A must be a positive integer")
    rng = np.random.default_rng(np.random.SeedSequence((seed,)))
    e = rng.exponential(1.0, size=A)
    e /= e.sum()
    return Distribution(tuple(float(x) for x in e))


def _labels(A: int) -> tuple[str, ...]:
    return tuple(f"u{i + 1}" for i in range(A))


def sample_counts(p, n: int, seed: int) -> WinCounts:
    """n categorical draws from p via inverse-CDF over the fixed symbol order."""
    probs = np.asarray(getattr(p, "probs", p), dtype=float)
    if not isinstance(n, int) or n < 0:
        raise ValueError("n must be a non-negative integer")
    rng = np.random.default_rng(np.random.SeedSequence((seed,)))
    cdf = np.cumsum(probs)
    if n == 0:
        counts = np.zeros(probs.size, dtype=int)
    else:
        idx = np.searchsorted(cdf, rng.random(n), side="right")
        np.clip(idx, 0, probs.size - 1, out=idx)
        counts = np.bincount(idx, minlength=probs.size)
    return WinCounts(_labels(probs.size), tuple(int(c) for c in counts))


def _oracle_seed(seed: int, n: int) -> int:
    state = np.random.SeedSequence((seed, n, _ORACLE_STREAM)).generate_state(2)
    return (int(state[0]) << 32) | int(state[1])


def coverage_experiment(
    p,
    n_grid,
    delta: float,
    methods=("finite", "asymptotic"),
    reps: int = 1000,
    seed: int = 0,
    *,
    m: int | str = "auto",
    delta_split: float = 0.9,
    oracle_reps: int = 100_000,
    threads: int = 1,
    descriptor: str = "",
) -> CoverageReport:
    """Empirical coverage and mean subset size per method over an n grid.

    All methods see the same replicate draws (common random numbers).  The
    oracle method is pre-calibrated per n with ``oracle_reps`` independent
    replicates on a separate stream, then evaluated like the others.  Results
    are independent of ``threads``.
    """
    probs = np.asarray(getattr(p, "probs", p), dtype=float)
    n_grid = tuple(int(n) for n in n_grid)
    if len(n_grid) == 0 or any(n < 2 for n in n_grid):
        raise ValueError("n_grid must be non-empty with every n >= 2")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    if not isinstance(reps, int) or reps < 1:
        raise ValueError("reps must be a positive integer")
    if not isinstance(seed, int) or seed < 0:
        raise ValueError("seed must be a non-negative integer")
    if not isinstance(threads, int) or threads < 1:
        raise ValueError("threads must be a positive integer")
    methods = tuple(dict.fromkeys(methods))
    valid = {"finite", "asymptotic", "oracle"}
    if not methods or not set(methods) <= valid:
        raise ValueError(f"methods must be a non-empty subset of {sorted(valid)}")

    s_idx = int(np.argmax(probs))
    if "oracle" in methods and int(np.sum(probs == probs[s_idx])) != 1:
        raise ValueError("the oracle method requires a unique most probable symbol")

    a = probs.size
    labels = _labels(a)
    s_label = labels[s_idx]
    cdf = np.cumsum(probs)

    rows: list[CoverageRow] = []
    for n in n_grid:
        oracle_w = None
        if "oracle" in methods:
            oracle_w = baselines.oracle_width(
                probs, n, delta, reps=oracle_reps, seed=_oracle_seed(seed, n)
            )

        cover = {meth: np.zeros(reps, dtype=bool) for meth in methods}
        size = {meth: np.zeros(reps, dtype=np.int64) for meth in methods}

        def run_range(lo: int, hi: int, n=n, oracle_w=oracle_w, cover=cover, size=size):
            for r in range(lo, hi):
                rng = np.random.default_rng(np.random.SeedSequence((seed, n, r)))
                idx = np.searchsorted(cdf, rng.random(n), side="right")
                np.clip(idx, 0, a - 1, out=idx)
                c = np.bincount(idx, minlength=a)
                wc = WinCounts(labels, tuple(int(x) for x in c))
                p_hat = c / n
                p_max = float(p_hat.max())
                for meth in methods:
                    if meth == "oracle":
                        thr = p_max - oracle_w - 1e-12
                        cover[meth][r] = p_hat[s_idx] >= thr
                        size[meth][r] = int(np.sum(p_hat >= thr))
                    else:
                        with warnings.catch_warnings():
                            warnings.simplefilter("ignore", LargeSampleAdvisory)
                            sub = select_subset(
                                wc, delta, meth, m=m, delta_split=delta_split
                            )
                        cover[meth][r] = s_label in sub.members
                        size[meth][r] = len(sub.members)

        if threads == 1:
            run_range(0, reps)
        else:
            chunk = max(1, -(-reps // threads))
            spans = [(lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(lambda span: run_range(*span), spans))

        for meth in methods:
            cov = float(np.mean(cover[meth]))
            sz = size[meth].astype(float)
            se_cov = float(np.sqrt(cov * (1.0 - cov) / reps))
            se_sz = float(np.std(sz, ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
            rows.append(
                CoverageRow(
                    method=meth,
                    n=n,
                    coverage=cov,
                    mean_size=float(np.mean(sz)),
                    se_coverage=se_cov,
                    se_size=se_sz,
                )
            )

    return CoverageReport(
        rows=tuple(rows),
        delta=delta,
        reps=reps,
        seed=seed,
        descriptor=descriptor,
        alphabet_size=a,
        top_prob=float(probs.max()),
        methods=methods,
        n_grid=n_grid,
    )
