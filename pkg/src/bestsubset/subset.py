"""Confidence subsets guaranteed to contain the most probable symbol.

Given win counts over an alphabet, :func:`select_subset` returns every symbol
whose empirical frequency is within a confidence width of the empirical
maximum.  With the finite-sample method the width is twice the data-dependent
moment bound, which guarantees coverage at level 1 - delta for every n >= 2;
the asymptotic method uses the CLT width and is only trustworthy when n is
large relative to the squared gap between the two leading frequencies.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import bounds

__all__ = [
    "WinCounts",
    "Distribution",
    "ConfidenceSubset",
    "LargeSampleAdvisory",
    "mle",
    "winners",
    "select_subset",
]


class LargeSampleAdvisory(RuntimeWarning):
    """Raised as a warning when the CLT width is requested outside its regime."""


@dataclass(frozen=True)
class WinCounts:
    """Per-symbol win counts; labels are unique and order is meaningful."""

    labels: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValueError("at least one label is required")
        if len(self.labels) != len(self.counts):
            raise ValueError("labels and counts must have equal length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")
        for c in self.counts:
            if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                raise ValueError("counts must be non-negative integers")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def alphabet_size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Distribution:
    """A probability vector over the alphabet, optionally empirical.

    ``empirical_n`` records the denominator when the vector came from counts;
    ``None`` marks a true (population) distribution.  The entries must be
    non-negative and sum to 1 within 1e-12.
    """

    probs: tuple[float, ...]
    empirical_n: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("probs must be a non-empty 1-d sequence")
        if np.any(arr < 0.0) or np.any(~np.isfinite(arr)):
            raise ValueError("probs must be finite and non-negative")
        if abs(float(arr.sum()) - 1.0) > 1e-12:
            raise ValueError("probs must sum to 1 (tolerance 1e-12)")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)


@dataclass(frozen=True)
class ConfidenceSubset:
    """The selected symbols plus the width and settings that produced them.

    ``vacuous`` is true when the width reaches the top empirical frequency,
    at which point the subset saturates to the whole alphabet.
    """

    members: tuple[str, ...]
    width: float
    method: str
    delta: float
    argmax_set: tuple[str, ...]
    vacuous: bool
    width_result: bounds.WidthResult = field(repr=False, default=None)


def mle(counts: WinCounts) -> Distribution:
    """Empirical frequencies counts/n as a Distribution (requires n >= 1)."""
    n = counts.n
    if n < 1:
        raise ValueError("cannot form frequencies from all-zero counts")
    return Distribution(tuple(c / n for c in counts.counts), empirical_n=n)


def winners(counts: WinCounts) -> tuple[str, ...]:
    """Labels attaining the maximum count, in label order."""
    top = max(counts.counts)
    return tuple(l for l, c in zip(counts.labels, counts.counts) if c == top)


def _advisory_check(p_hat: np.ndarray, n: int) -> None:
    if p_hat.size < 2:
        return
    top_two = np.partition(p_hat, -2)[-2:]
    gap = float(top_two[1] - top_two[0])
    score = p_hat.size * np.exp(-n * gap * gap)
    if score > 1.0:
        warnings.warn(
            "asymptotic width requested where the large-sample approximation "
            f"is doubtful (A*exp(-n*gap^2) = {score:.3g} > 1); coverage may "
            "fall below the nominal level",
            LargeSampleAdvisory,
            stacklevel=3,
        )


def select_subset(
    counts: WinCounts,
    delta: float,
    method: str = "finite",
    *,
    m: int | str = "auto",
    delta_split: float = 0.9,
) -> ConfidenceSubset:
    """All symbols within the confidence width of the empirical maximum.

    method="finite": width = 2 * data_dependent_width(mle, n, d1, d2, m) with
    d1 = delta_split * delta and d2 = (1 - delta_split) * delta; m defaults to
    choose_m(d1).  Valid for every n >= 2.

    method="asymptotic": width = asymptotic_width(top frequency, n, delta);
    a LargeSampleAdvisory warning fires when A * exp(-n*gap^2) > 1.

    Membership uses an inclusive tolerance of 1e-12 so frequencies exactly on
    the threshold are kept.
    """
    if method not in ("finite", "asymptotic"):
        raise ValueError("method must be 'finite' or 'asymptotic'")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    if not 0.0 < delta_split < 1.0:
        raise ValueError("delta_split must lie strictly between 0 and 1")

    dist = mle(counts)
    p_hat = dist.as_array()
    n = counts.n
    p_max = float(p_hat.max())

    if method == "finite":
        delta_1 = delta_split * delta
        delta_2 = delta - delta_1
        if m == "auto":
            m_val = bounds.choose_m(delta_1)
        else:
            if not isinstance(m, int) or m < 2 or m % 2 != 0:
                raise ValueError("m must be 'auto' or an even integer >= 2")
            m_val = m
        wr = bounds.data_dependent_width(dist, n, delta_1, delta_2, m_val)
        width = 2.0 * wr.width
    else:
        _advisory_check(p_hat, n)
        wr = bounds.asymptotic_width(p_max, n, delta)
        width = wr.width

    threshold = p_max - width - bounds.MEMBERSHIP_TOLERANCE
    members = tuple(
        l for l, v in zip(counts.labels, p_hat) if v >= threshold
    )
    return ConfidenceSubset(
        members=members,
        width=width,
        method=method,
        delta=delta,
        argmax_set=winners(counts),
        vacuous=width >= p_max,
        width_result=wr,
    )
