"""CSV ingestion: win counts, score matrices, and rank/win conversions."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import rankdata

from .baselines import RankMatrix
from .subset import WinCounts

__all__ = [
    "ScoreMatrix",
    "parse_counts_csv",
    "parse_scores_csv",
    "wins_from_scores",
    "ranks_from_scores",
]

_DIRECTIONS = ("higher_better", "lower_better")
_TIE_POLICIES = ("random", "first", "all_fractional_rounded")


@dataclass(frozen=True)
class ScoreMatrix:
    """Per-dataset scores (rows) for each algorithm (columns)."""

    datasets: tuple[str, ...]
    algorithms: tuple[str, ...]
    scores: np.ndarray
    direction: str
    dropped_rows: int = 0

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=float)
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 2:
            raise ValueError("scores must be an n x A matrix with A >= 2")
        if s.shape != (len(self.datasets), len(self.algorithms)):
            raise ValueError("scores shape must match dataset and algorithm names")
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"direction must be one of {_DIRECTIONS}")
        object.__setattr__(self, "scores", s)

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    @property
    def alphabet_size(self) -> int:
        return self.scores.shape[1]


def _read_rows(path: str) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        return [row for row in csv.reader(fh)]


def parse_counts_csv(path: str) -> WinCounts:
    """Read a two-column CSV with header ``algorithm,count``."""
    rows = _read_rows(path)
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [c.strip().lower() for c in rows[0]]
    if header != ["algorithm", "count"]:
        raise ValueError(f"{path}: header must be 'algorithm,count'")
    labels: list[str] = []
    counts: list[int] = []
    for i, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ValueError(f"{path}: line {i}: expected two columns")
        label = row[0].strip()
        raw = row[1].strip()
        if not label:
            raise ValueError(f"{path}: line {i}: empty algorithm name")
        if label in labels:
            raise ValueError(f"{path}: line {i}: duplicate algorithm {label!r}")
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{path}: line {i}: count {raw!r} is not an integer") from None
        if value < 0:
            raise ValueError(f"{path}: line {i}: count must be non-negative")
        labels.append(label)
        counts.append(value)
    if not labels:
        raise ValueError(f"{path}: no data rows")
    return WinCounts(tuple(labels), tuple(counts))


def parse_scores_csv(path: str, direction: str = "higher_better") -> ScoreMatrix:
    """Read a score matrix CSV: first column ``dataset``, one column per algorithm.

    Rows with missing or non-numeric cells are dropped and counted in
    ``dropped_rows``.
    """
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}")
    rows = _read_rows(path)
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    if not header or header[0].lower() != "dataset":
        raise ValueError(f"{path}: first header column must be 'dataset'")
    algorithms = tuple(header[1:])
    if len(algorithms) < 2:
        raise ValueError(f"{path}: need at least two algorithm columns")
    if len(set(algorithms)) != len(algorithms):
        raise ValueError(f"{path}: duplicate algorithm columns")
    datasets: list[str] = []
    data: list[list[float]] = []
    dropped = 0
    for row in rows[1:]:
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            dropped += 1
            continue
        try:
            vals = [float(c) for c in row[1:]]
        except ValueError:
            dropped += 1
            continue
        if any(not np.isfinite(v) for v in vals):
            dropped += 1
            continue
        datasets.append(row[0].strip())
        data.append(vals)
    if not datasets:
        raise ValueError(f"{path}: no complete data rows")
    return ScoreMatrix(
        datasets=tuple(datasets),
        algorithms=algorithms,
        scores=np.asarray(data, dtype=float),
        direction=direction,
        dropped_rows=dropped,
    )


def _oriented(scores: ScoreMatrix) -> np.ndarray:
    s = scores.scores
    return s if scores.direction == "higher_better" else -s


def wins_from_scores(
    scores: ScoreMatrix, tie_policy: str = "random", seed: int = 0
) -> WinCounts:
    """Per-dataset winners aggregated into win counts.

    Ties on a dataset are resolved by policy: ``random`` picks one tied
    algorithm with a seeded generator, ``first`` takes the earliest column,
    and ``all_fractional_rounded`` splits the win equally and rounds the
    final fractional totals by largest remainder so counts still sum to n.
    """
    if tie_policy not in _TIE_POLICIES:
        raise ValueError(f"tie_policy must be one of {_TIE_POLICIES}")
    o = _oriented(scores)
    a = scores.alphabet_size
    rng = np.random.default_rng(np.random.SeedSequence((seed,)))

    if tie_policy == "all_fractional_rounded":
        credit = [Fraction(0)] * a
        for row in o:
            top = row.max()
            tied = [j for j in range(a) if row[j] == top]
            share = Fraction(1, len(tied))
            for j in tied:
                credit[j] += share
        base = [c.numerator // c.denominator for c in credit]
        remainder = [c - b for c, b in zip(credit, base)]
        short = scores.n - sum(base)
        order = sorted(range(a), key=lambda j: (-remainder[j], j))
        counts = list(base)
        for j in order[:short]:
            counts[j] += 1
    else:
        counts = [0] * a
        for row in o:
            top = row.max()
            tied = np.flatnonzero(row == top)
            if tied.size == 1 or tie_policy == "first":
                counts[int(tied[0])] += 1
            else:
                counts[int(rng.choice(tied))] += 1

    return WinCounts(scores.algorithms, tuple(counts))


def ranks_from_scores(scores: ScoreMatrix) -> RankMatrix:
    """Within-dataset ranks, 1 = best, ties as midranks."""
    ranks = rankdata(-_oriented(scores), axis=1, method="average")
    return RankMatrix(
        ranks=ranks, algorithms=scores.algorithms, tie_handling="midrank"
    )
