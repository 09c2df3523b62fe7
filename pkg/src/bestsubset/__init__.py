"""Minimal confidence subsets for the most probable symbol of a multinomial.

The package selects, from win counts over an alphabet of algorithms, the
smallest set of symbols that contains the truly most probable one with a
prescribed confidence.  Finite-sample widths come from exact central-moment
bounds; asymptotic, simplified, and minimax lower-bound widths plus rank-test
baselines and a Monte Carlo oracle are provided for comparison.
"""

from .baselines import (
    PairComparison,
    RankMatrix,
    VerificationChain,
    friedman_test,
    nemenyi_cd,
    oracle_width,
    rank_verification,
    studentized_range_quantile,
)
from .bounds import (
    WidthResult,
    asymptotic_width,
    choose_m,
    data_dependent_width,
    data_independent_width,
    epsilon_n,
    lower_bound_width,
    normal_quantile,
    simplified_width,
)
from .ingest import (
    ScoreMatrix,
    parse_counts_csv,
    parse_scores_csv,
    ranks_from_scores,
    wins_from_scores,
)
from .moments import (
    MomentPolynomial,
    central_moment_poly,
    coefficients,
    eval_central_moment,
    sup_derivative_term,
)
from .simulate import (
    CoverageReport,
    CoverageRow,
    coverage_experiment,
    sample_counts,
    uniform_simplex,
    zipf_distribution,
)
from .subset import (
    ConfidenceSubset,
    Distribution,
    LargeSampleAdvisory,
    WinCounts,
    mle,
    select_subset,
    winners,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "MomentPolynomial",
    "central_moment_poly",
    "coefficients",
    "eval_central_moment",
    "sup_derivative_term",
    "WidthResult",
    "normal_quantile",
    "asymptotic_width",
    "data_independent_width",
    "data_dependent_width",
    "epsilon_n",
    "choose_m",
    "simplified_width",
    "lower_bound_width",
    "WinCounts",
    "Distribution",
    "ConfidenceSubset",
    "LargeSampleAdvisory",
    "mle",
    "winners",
    "select_subset",
    "RankMatrix",
    "PairComparison",
    "VerificationChain",
    "friedman_test",
    "studentized_range_quantile",
    "nemenyi_cd",
    "rank_verification",
    "oracle_width",
    "CoverageRow",
    "CoverageReport",
    "zipf_distribution",
    "uniform_simplex",
    "sample_counts",
    "coverage_experiment",
    "ScoreMatrix",
    "parse_counts_csv",
    "parse_scores_csv",
    "wins_from_scores",
    "ranks_from_scores",
]
