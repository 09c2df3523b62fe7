"""Rank-based comparison baselines and a Monte Carlo width oracle.

These are the procedures the confidence subsets are compared against:

* Friedman's rank test with the Iman-Davenport F correction, which answers
  only whether any algorithm differs, not which one is best.
* The Nemenyi critical difference built from the studentized range of
  independent standard normals (infinite degrees of freedom).
* A sequential sign-test chain down the sorted win counts, which certifies a
  prefix of the ranking pair by pair.
* ``oracle_width``: the exact Monte Carlo quantile of how far the empirical
  argmax can drift above the true best symbol, the tightest width any method
  with the same shape could achieve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, stats

from .subset import WinCounts

__all__ = [
    "RankMatrix",
    "PairComparison",
    "VerificationChain",
    "friedman_test",
    "studentized_range_quantile",
    "nemenyi_cd",
    "rank_verification",
    "oracle_width",
]

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class RankMatrix:
    """Per-dataset ranks (rows) for each algorithm (columns), 1 = best.

    Ties are expected to have been resolved into midranks; every row must sum
    to A(A+1)/2.  ``tie_handling`` records how ties were broken upstream.
    """

    ranks: np.ndarray
    algorithms: tuple[str, ...]
    tie_handling: str = "midrank"

    def __post_init__(self):
        r = np.asarray(self.ranks, dtype=float)
        if r.ndim != 2 or r.shape[0] < 1 or r.shape[1] < 2:
            raise ValueError("ranks must be an n x A matrix with A >= 2")
        if r.shape[1] != len(self.algorithms):
            raise ValueError("algorithm names must match rank columns")
        a = r.shape[1]
        expected = a * (a + 1) / 2.0
        if np.any(np.abs(r.sum(axis=1) - expected) > 1e-9):
            raise ValueError("each rank row must sum to A(A+1)/2")
        object.__setattr__(self, "ranks", r)

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    @property
    def alphabet_size(self) -> int:
        return self.ranks.shape[1]

    def average_ranks(self) -> np.ndarray:
        return self.ranks.mean(axis=0)


def friedman_test(ranks: RankMatrix, delta: float) -> dict:
    """Friedman chi-square plus the Iman-Davenport F refinement.

    Returns chi2_F, df, p_value (chi-square), iman_F, iman_p, reject.  The
    rejection decision uses the Iman-Davenport p-value, which is less
    conservative than the chi-square approximation.  When the chi-square
    statistic attains its maximum n(A-1) the F denominator vanishes; the
    statistic is reported as +inf with p-value 0.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    n = ranks.n
    a = ranks.alphabet_size
    if n < 2:
        raise ValueError("Friedman test needs at least two datasets")
    rbar = ranks.average_ranks()
    chi2 = 12.0 * n / (a * (a + 1.0)) * (float(np.sum(rbar**2)) - a * (a + 1.0) ** 2 / 4.0)
    chi2 = max(chi2, 0.0)
    df = a - 1
    p_value = float(stats.chi2.sf(chi2, df))
    denom = n * (a - 1.0) - chi2
    if denom <= 1e-12 * n * (a - 1.0):
        iman_f = math.inf
        iman_p = 0.0
    else:
        iman_f = (n - 1.0) * chi2 / denom
        iman_p = float(stats.f.sf(iman_f, a - 1, (a - 1) * (n - 1)))
    return {
        "chi2_F": chi2,
        "df": df,
        "p_value": p_value,
        "iman_F": iman_f,
        "iman_p": iman_p,
        "reject": iman_p <= delta,
    }


def _phi(u: float) -> float:
    return math.exp(-0.5 * u * u) / _SQRT2PI


def _Phi(u: float) -> float:
    return 0.5 * math.erfc(-u / _SQRT2)


@lru_cache(maxsize=None)
def studentized_range_quantile(A: int, delta: float) -> float:
    """(1 - delta) quantile of the range of A iid standard normals.

    CDF via adaptive quadrature of A * phi(u) * (Phi(u+w) - Phi(u))**(A-1)
    over u, inverted with Brent root finding.  Absolute error <= 1e-4.
    """
    if not isinstance(A, int) or A < 2:
        raise ValueError("A must be an integer >= 2")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")

    def cdf(w: float) -> float:
        if w <= 0.0:
            return 0.0
        val, _ = integrate.quad(
            lambda u: _phi(u) * (_Phi(u + w) - _Phi(u)) ** (A - 1),
            -12.0,
            12.0,
            limit=200,
            epsabs=1e-12,
            epsrel=1e-10,
        )
        return A * val

    target = 1.0 - delta
    hi = 8.0
    while cdf(hi) < target and hi < 128.0:
        hi *= 2.0
    return float(optimize.brentq(lambda w: cdf(w) - target, 1e-9, hi, xtol=1e-8))


def nemenyi_cd(A: int, n: int, delta: float, ranks: RankMatrix | None = None) -> dict:
    """Nemenyi critical difference for average ranks over n datasets.

    cd = (q_{delta,A} / sqrt(2)) * sqrt(A(A+1) / (6n)) with q the studentized
    range quantile at infinite degrees of freedom.  If a RankMatrix is given,
    pairwise significance decisions (|avg rank difference| >= cd) are included
    under ``decisions``.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    q = studentized_range_quantile(A, delta)
    cd = (q / _SQRT2) * math.sqrt(A * (A + 1.0) / (6.0 * n))
    out = {"cd": cd, "q_over_sqrt2": q / _SQRT2}
    if ranks is not None:
        if ranks.alphabet_size != A or ranks.n != n:
            raise ValueError("rank matrix shape must match A and n")
        avg = ranks.average_ranks()
        decisions = []
        for i in range(A):
            for j in range(i + 1, A):
                diff = float(abs(avg[i] - avg[j]))
                decisions.append(
                    {
                        "pair": (ranks.algorithms[i], ranks.algorithms[j]),
                        "rank_diff": diff,
                        "significant": diff >= cd,
                    }
                )
        out["decisions"] = decisions
        out["average_ranks"] = [float(v) for v in avg]
    return out


@dataclass(frozen=True)
class PairComparison:
    """One sign test between adjacent symbols in the sorted count order."""

    labels: tuple[str, str]
    counts: tuple[int, int]
    p_value: float
    reject: bool


@dataclass(frozen=True)
class VerificationChain:
    """Sequential sign tests down the sorted counts; stops at first failure.

    ``verified_prefix_length`` is the number of leading comparisons rejected,
    i.e. the length of the certified ranking prefix.
    """

    comparisons: tuple[PairComparison, ...]
    verified_prefix_length: int
    delta: float


def rank_verification(counts: WinCounts, delta: float) -> VerificationChain:
    """Certify a prefix of the count ranking with adjacent sign tests.

    Symbols are sorted by decreasing count (stable in label order).  For each
    adjacent pair the one-sided sign test p-value is
    P(Bin(N_i + N_{i+1}, 1/2) >= N_i); the chain rejects while p <= delta and
    stops at (and includes) the first non-rejection.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    if counts.alphabet_size < 2:
        raise ValueError("rank verification needs at least two symbols")
    arr = np.asarray(counts.counts)
    order = np.argsort(-arr, kind="stable")
    comparisons: list[PairComparison] = []
    prefix = 0
    for i in range(len(order) - 1):
        hi, lo = int(order[i]), int(order[i + 1])
        n1, n2 = int(arr[hi]), int(arr[lo])
        p_val = float(stats.binom.sf(n1 - 1, n1 + n2, 0.5))
        reject = p_val <= delta
        comparisons.append(
            PairComparison(
                labels=(counts.labels[hi], counts.labels[lo]),
                counts=(n1, n2),
                p_value=p_val,
                reject=reject,
            )
        )
        if not reject:
            break
        prefix += 1
    return VerificationChain(
        comparisons=tuple(comparisons), verified_prefix_length=prefix, delta=delta
    )


def _counts_from_uniforms(u: np.ndarray, cdf: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cdf, u, side="right")
    np.clip(idx, 0, cdf.size - 1, out=idx)
    return np.bincount(idx, minlength=cdf.size)


def oracle_width(p, n: int, delta: float, reps: int = 100_000, seed: int = 0) -> float:
    """Monte Carlo (1 - delta) quantile of p_hat_max - p_hat_star.

    The tightest width any subset rule of the same thresholding shape could
    use while covering the true argmax with probability 1 - delta under the
    known distribution ``p``.  Requires a unique maximiser and reps >= 1000.
    Replicate r draws from an independent stream derived from (seed, r), so
    the result does not depend on evaluation order.  The quantile uses the
    conservative 'higher' interpolation.
    """
    probs = np.asarray(getattr(p, "probs", p), dtype=float)
    if probs.ndim != 1 or probs.size == 0:
        raise ValueError("p must be a non-empty 1-d probability vector")
    if abs(float(probs.sum()) - 1.0) > 1e-12 or np.any(probs < 0.0):
        raise ValueError("p must be a probability vector summing to 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if not isinstance(reps, int) or reps < 1000:
        raise ValueError("oracle calibration needs at least 1000 replicates")
    if not isinstance(seed, int) or seed < 0:
        raise ValueError("seed must be a non-negative integer")
    s_idx = int(np.argmax(probs))
    if int(np.sum(probs == probs[s_idx])) != 1:
        raise ValueError("oracle width requires a unique most probable symbol")

    cdf = np.cumsum(probs)
    gaps = np.empty(reps)
    for r in range(reps):
        rng = np.random.default_rng(np.random.SeedSequence((seed, r)))
        c = _counts_from_uniforms(rng.random(n), cdf)
        gaps[r] = (int(c.max()) - int(c[s_idx])) / n
    return float(np.quantile(gaps, 1.0 - delta, method="higher"))
