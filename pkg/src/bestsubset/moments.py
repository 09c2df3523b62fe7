"""Central moments of the binomial distribution as exact polynomials.

For ``Y ~ Bin(n, theta)`` write ``q = theta * (1 - theta)``.  The m-th central
moment ``E[(Y - n*theta)**m]`` is a polynomial in ``q`` with coefficients that
are themselves integer polynomials in ``n``:

    even m:  sum_{k=1}^{m//2} c[k] * q**k
    odd m:   (1 - 2*theta) * sum_{k=1}^{(m-1)//2} c[k] * q**k

This representation is closed under the classical derivative recurrence

    mu_{m+1} = q * ( n * m * mu_{m-1} + d(mu_m)/d(theta) )

because ``d(q**k)/d(theta) = k * q**(k-1) * (1 - 2*theta)`` and
``(1 - 2*theta)**2 = 1 - 4*q``.  Carrying the recurrence in this basis keeps
every symbolic step in arbitrary-precision integer arithmetic; floats only
appear when a polynomial is instantiated at a concrete ``(n, theta)``.

The first few instances (exact, verified against direct pmf summation):

    m=2: n*q
    m=3: (1-2t) * n*q
    m=4: n*q + (3n^2 - 6n)*q^2
    m=5: (1-2t) * ( n*q + (10n^2 - 12n)*q^2 )
    m=6: n*q + (25n^2 - 30n)*q^2 + (15n^3 - 130n^2 + 120n)*q^3

Note that coefficients can be negative for small ``n`` (for example the q^2
coefficient of m=4 at n=1 is -3); downstream consumers that need signed sums
should use :func:`signed_log_coefficients`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "MomentPolynomial",
    "central_moment_poly",
    "coefficients",
    "signed_log_coefficients",
    "coefficient_bound_flags",
    "eval_central_moment",
    "sup_derivative_term",
]


# ---------------------------------------------------------------------------
# integer polynomials in n, stored as tuples of coefficients (ascending powers)


def _padd(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    if len(a) < len(b):
        a, b = b, a
    return tuple(x + (b[i] if i < len(b) else 0) for i, x in enumerate(a))


def _pscale(a: tuple[int, ...], s: int) -> tuple[int, ...]:
    return tuple(x * s for x in a)


def _pshift(a: tuple[int, ...]) -> tuple[int, ...]:
    # multiply by n
    return (0,) + a if a else a


def _peval(a: tuple[int, ...], n: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = acc * n + c
    return acc


@dataclass(frozen=True)
class MomentPolynomial:
    """Symbolic m-th central moment of Bin(n, theta) in the q-basis.

    ``coeffs[k-1]`` is the integer polynomial in ``n`` multiplying ``q**k``;
    odd orders carry an additional global factor ``(1 - 2*theta)``.
    """

    order: int
    parity: str  # "even" or "odd"
    coeffs: tuple[tuple[int, ...], ...]

    def instantiate(self, n: int) -> tuple[int, ...]:
        """Exact integer coefficients c_k at a concrete n, for k = 1..len."""
        return tuple(_peval(c, n) for c in self.coeffs)

    def eval(self, n: int, theta):
        """E[(Y - n*theta)**order] for Y ~ Bin(n, theta).

        Horner evaluation in q = theta*(1-theta); exact when ``theta`` is a
        ``Fraction``, ordinary floating point otherwise.
        """
        q = theta * (1 - theta)
        acc = 0
        for c in reversed(self.instantiate(n)):
            acc = acc * q + c
        acc = acc * q
        if self.parity == "odd":
            acc = (1 - 2 * theta) * acc
        return acc


@lru_cache(maxsize=None)
def central_moment_poly(m: int) -> MomentPolynomial:
    """Symbolic m-th central moment, built by the derivative recurrence."""
    if not isinstance(m, int) or m < 1:
        raise ValueError("moment order m must be a positive integer")
    if m == 1:
        return MomentPolynomial(1, "odd", ())
    if m == 2:
        return MomentPolynomial(2, "even", ((0, 1),))

    cur = central_moment_poly(m - 1)  # mu_{m-1}
    prev = central_moment_poly(m - 2)  # mu_{m-2}
    mm = m - 1
    C = cur.coeffs
    B = prev.coeffs
    d_new = mm // 2 if cur.parity == "even" else (mm + 1) // 2
    out: list[tuple[int, ...]] = []
    for i in range(1, d_new + 1):
        term: tuple[int, ...] = (0,)
        # q * n * mm * mu_{m-2} contributes mm * n * B[i-1] to the q^i slot
        if 1 <= i - 1 <= len(B):
            term = _padd(term, _pshift(_pscale(B[i - 2], mm)))
        # derivative of the q^i piece of mu_{m-1}
        if i <= len(C):
            term = _padd(term, _pscale(C[i - 1], i))
        # odd mu_{m-1}: the (1-2t)^2 = 1 - 4q reduction feeds q^{i-1} upward
        if cur.parity == "odd" and 1 <= i - 1 <= len(C):
            term = _padd(term, _pscale(C[i - 2], -(4 * (i - 1) + 2)))
        out.append(term)
    parity = "odd" if cur.parity == "even" else "even"
    return MomentPolynomial(m, parity, tuple(out))


def coefficients(m: int, n: int) -> list[int]:
    """Exact integer coefficients c_{k,m,n}, k = 1..m/2, for even m.

    These multiply q^k in E[(Y - n*theta)**m]; they are exact Python ints and
    can be very large (the leading one grows like (n*m/2)^{m/2}).
    """
    if not isinstance(m, int) or m < 2 or m % 2 != 0:
        raise ValueError("coefficients are defined for even moment order m >= 2")
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    return list(central_moment_poly(m).instantiate(n))


def signed_log_coefficients(m: int, n: int) -> tuple[tuple[int, ...], tuple[float, ...]]:
    """(signs, log-magnitudes) of c_{k,m,n} for overflow-safe signed sums.

    Zero coefficients get sign 0 and log -inf.
    """
    signs: list[int] = []
    logs: list[float] = []
    for c in coefficients(m, n):
        if c == 0:
            signs.append(0)
            logs.append(float("-inf"))
        else:
            signs.append(1 if c > 0 else -1)
            logs.append(math.log(abs(c)))
    return tuple(signs), tuple(logs)


def coefficient_bound_flags(m: int, n: int) -> list[bool]:
    """Whether c_{k,m,n} <= k**(m-k) * n**k holds, per k (exact arithmetic).

    The blanket bound fails for some interior k once m >= 6 (for example
    c_{2,6,4} = 280 > 2**4 * 4**2 = 256), so callers should treat these flags
    as diagnostics rather than assumptions.  The leading case k = m/2 holds on
    every (m, n) checked exhaustively for m <= 12, n <= 100.
    """
    flags = []
    for k, c in enumerate(coefficients(m, n), start=1):
        flags.append(c <= k ** (m - k) * n**k)
    return flags


def eval_central_moment(m: int, n: int, theta):
    """E[(Y - n*theta)**m] for Y ~ Bin(n, theta); exact for Fraction theta."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if not 0 <= theta <= 1:
        raise ValueError("theta must lie in [0, 1]")
    return central_moment_poly(m).eval(n, theta)


@lru_cache(maxsize=None)
def sup_derivative_term(m: int, n: int) -> float:
    """sup over p in [0,1] of (1-2p) * sum_k c_{k,m,n} * k * (p(1-p))**(k-1).

    This is the largest per-coordinate sensitivity of the plug-in moment sum.
    The objective is a polynomial of degree at most m-1, so a dense 4097-point
    scan brackets the maximiser; golden-section refinement then polishes it.
    The value at p = 0 equals c_{1,m,n} = n, which is a lower bound on the
    supremum and anchors the absolute tolerance 1e-12 * c_{1,m,n}.
    """
    cs = [float(c) for c in coefficients(m, n)]

    def deriv(p: float) -> float:
        q = p * (1.0 - p)
        acc = 0.0
        for k in range(len(cs), 0, -1):
            acc = acc * q + cs[k - 1] * k
        return acc * (1.0 - 2.0 * p)

    grid = np.linspace(0.0, 1.0, 4097)
    qg = grid * (1.0 - grid)
    acc = np.zeros_like(grid)
    for k in range(len(cs), 0, -1):
        acc = acc * qg + cs[k - 1] * k
    vals = acc * (1.0 - 2.0 * grid)

    i = int(np.argmax(vals))
    best = float(vals[i])
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, grid.size - 1)])

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = deriv(x1), deriv(x2)
    tol = 1e-12 * max(1.0, float(n))
    for _ in range(200):
        if (b - a) <= 1e-15 and abs(f1 - f2) <= tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = deriv(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = deriv(x2)
    return max(best, f1, f2)
