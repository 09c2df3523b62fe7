"""Tests for the exact central-moment machinery.

The ground truth throughout is direct pmf summation in exact rational
arithmetic: E[(Y - n*theta)**m] = sum_y C(n,y) theta^y (1-theta)^(n-y) (y-n*theta)^m.
"""

import math
from fractions import Fraction

import pytest

from bestsubset import moments


def pmf_central_moment(m: int, n: int, theta: Fraction) -> Fraction:
    """Exact m-th central moment of Bin(n, theta) by direct summation."""
    mean = n * theta
    total = Fraction(0)
    for y in range(n + 1):
        prob = Fraction(math.comb(n, y)) * theta**y * (1 - theta) ** (n - y)
        total += prob * (Fraction(y) - mean) ** m
    return total


# symbolic coefficients, ascending powers of n, per q^k slot
EXPECTED_POLYS = {
    2: ("even", ((0, 1),)),
    3: ("odd", ((0, 1),)),
    4: ("even", ((0, 1), (0, -6, 3))),
    5: ("odd", ((0, 1), (0, -12, 10))),
    6: ("even", ((0, 1), (0, -30, 25), (0, 120, -130, 15))),
}


@pytest.mark.parametrize("m", sorted(EXPECTED_POLYS))
def test_symbolic_closed_forms(m):
    poly = moments.central_moment_poly(m)
    parity, coeffs = EXPECTED_POLYS[m]
    assert poly.parity == parity
    assert poly.order == m
    assert poly.coeffs == coeffs


def test_first_moment_is_zero():
    poly = moments.central_moment_poly(1)
    assert poly.coeffs == ()
    assert moments.eval_central_moment(1, 9, Fraction(2, 7)) == 0


@pytest.mark.parametrize("m", range(1, 11))
@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12])
@pytest.mark.parametrize(
    "theta", [Fraction(1, 7), Fraction(1, 3), Fraction(1, 2), Fraction(5, 8), Fraction(9, 10)]
)
def test_exact_agreement_with_pmf_summation(m, n, theta):
    assert moments.eval_central_moment(m, n, theta) == pmf_central_moment(m, n, theta)


def test_known_evaluations():
    assert moments.eval_central_moment(2, 10, 0.5) == 2.5
    assert moments.eval_central_moment(4, 10, 0.5) == 17.5
    assert moments.eval_central_moment(4, 10, 0.0) == 0.0
    assert moments.eval_central_moment(3, 6, 0.5) == 0.0  # odd moment, symmetric


def test_coefficients_examples():
    assert moments.coefficients(4, 10) == [10, 240]
    assert moments.coefficients(2, 7) == [7]
    assert moments.coefficients(6, 8) == [8, 1360, 320]


def test_coefficients_can_be_negative_at_tiny_n():
    # q^2 and q^3 slots flip sign for very small n; consumers must not
    # assume positivity
    assert moments.coefficients(6, 1) == [1, -5, 5]
    assert moments.coefficients(4, 1) == [1, -3]


@pytest.mark.parametrize("bad_m", [0, -2, 3, 7])
def test_coefficients_reject_non_even_orders(bad_m):
    with pytest.raises(ValueError):
        moments.coefficients(bad_m, 10)


def test_poly_order_zero_rejected():
    with pytest.raises(ValueError):
        moments.central_moment_poly(0)


def test_eval_validates_inputs():
    with pytest.raises(ValueError):
        moments.eval_central_moment(4, 0, 0.5)
    with pytest.raises(ValueError):
        moments.eval_central_moment(4, 10, 1.5)


@pytest.mark.parametrize("m", [2, 4, 6, 8])
@pytest.mark.parametrize("n", [3, 9])
def test_parity_reflection(m, n):
    theta = Fraction(2, 7)
    even_val = moments.eval_central_moment(m, n, theta)
    assert even_val == moments.eval_central_moment(m, n, 1 - theta)
    odd_val = moments.eval_central_moment(m + 1, n, theta)
    assert odd_val == -moments.eval_central_moment(m + 1, n, 1 - theta)


@pytest.mark.parametrize("m", [2, 4, 6, 8, 10, 12])
def test_leading_coefficient_bound(m):
    # the k = m/2 case of the growth bound holds on the whole range tested
    d = m // 2
    for n in range(1, 41):
        c_lead = moments.coefficients(m, n)[-1]
        assert c_lead <= (d * n) ** d


def test_bound_flags_mixed():
    # k=1 always holds (c_1 = n <= n^1); the interior k=2 slot violates the
    # blanket bound for m=6 once n is moderate: 25n^2 - 30n > 16n^2 for n >= 4
    flags = moments.coefficient_bound_flags(6, 10)
    assert flags[0] is True
    assert flags[1] is False
    assert all(moments.coefficient_bound_flags(4, 10))


def test_signed_log_coefficients_roundtrip():
    signs, logs = moments.signed_log_coefficients(6, 2)
    cs = moments.coefficients(6, 2)
    for c, s, lg in zip(cs, signs, logs):
        if c == 0:
            assert s == 0 and lg == float("-inf")
        else:
            assert s == (1 if c > 0 else -1)
            assert lg == pytest.approx(math.log(abs(c)), rel=1e-15)


def test_instantiate_matches_coefficients():
    poly = moments.central_moment_poly(8)
    assert list(poly.instantiate(11)) == moments.coefficients(8, 11)


class TestSupDerivativeTerm:
    def test_m2_is_exactly_n(self):
        # f'(p) = n(1-2p) is maximised at p = 0
        for n in (1, 5, 40):
            assert moments.sup_derivative_term(2, n) == float(n)

    @pytest.mark.parametrize("m,n", [(4, 10), (6, 8), (8, 25)])
    def test_against_dense_grid(self, m, n):
        import numpy as np

        cs = [float(c) for c in moments.coefficients(m, n)]
        p = np.linspace(0.0, 1.0, 1_000_001)
        q = p * (1 - p)
        acc = np.zeros_like(p)
        for k in range(len(cs), 0, -1):
            acc = acc * q + cs[k - 1] * k
        brute = float(np.max(acc * (1 - 2 * p)))
        val = moments.sup_derivative_term(m, n)
        assert val >= brute - 1e-9 * max(1.0, abs(brute))
        assert val == pytest.approx(brute, rel=1e-9)

    @pytest.mark.parametrize("m", [2, 4, 6, 8, 10])
    @pytest.mark.parametrize("n", [2, 10, 100])
    def test_at_least_first_coefficient(self, m, n):
        assert moments.sup_derivative_term(m, n) >= float(n)
