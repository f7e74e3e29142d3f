"""Variational machinery behind the acyclic-configuration rate.

The per-vertex rate of the no-cycles event is controlled by a family of
truncated tree generating polynomials: the polynomial of order r has
coefficients a_l/l! with a_l = l^(l-2) counting labelled trees on l vertices.
This module evaluates those polynomials, the tree function W inverting
w*exp(-w) on [0, 1/e], the saddle point of the associated objective, its
discrete-n counterpart, and the exact combinatorial sum over component-size
multiplicity vectors together with its polynomial upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, EvaluationRangeError
from .optimize import bisect_root, golden_section_min
from .rates import psi

_INV_E = math.exp(-1.0)
#: residual target for the tree-function solver
_W_RESIDUAL = 1e-14
#: bracket-width target for saddle bisections
_SADDLE_TOL = 1e-14


def tree_count(size):
    """Number of labelled trees on `size` vertices: size^(size-2)."""
    if size < 1:
        raise DomainError(f"size={size} must be at least 1")
    if size == 1:
        return 1
    return size ** (size - 2)


@lru_cache(maxsize=None)
def _coefficient_fractions(r):
    # a_l / l! as exact rationals, l = 1..r
    out = []
    fact = 1
    for size in range(1, r + 1):
        fact *= size
        out.append(Fraction(tree_count(size), fact))
    return tuple(out)


@lru_cache(maxsize=None)
def _coefficients(r):
    try:
        return tuple(float(c) for c in _coefficient_fractions(r))
    except OverflowError as exc:
        raise EvaluationRangeError(
            f"tree polynomial coefficients overflow doubles at order {r}"
        ) from exc


@lru_cache(maxsize=None)
def _log_coefficients(r):
    # log(a_l / l!) via lgamma, safe for any order
    return tuple(
        (size - 2) * math.log(size) - math.lgamma(size + 1)
        for size in range(1, r + 1)
    )


@dataclass(frozen=True)
class TreePolynomial:
    """Truncated tree generating polynomial of a given order.

    coefficients[l-1] holds a_l/l! with a_l = l^(l-2); the first two are 1
    and 1/2.
    """

    r: int
    coefficients: tuple

    @classmethod
    def of_order(cls, r):
        if r < 1:
            raise DomainError(f"order r={r} must be at least 1")
        return cls(r=r, coefficients=_coefficients(r))

    def value(self, s):
        return f_r(s, self.r)

    def derivative(self, s):
        return f_r_prime(s, self.r)


def _check_poly_args(s, r):
    if r < 1:
        raise DomainError(f"order r={r} must be at least 1")
    if s < 0.0:
        raise DomainError(f"s={s} negative")


def f_r(s, r):
    """Sum of s^l * a_l / l! for l = 1..r."""
    _check_poly_args(s, r)
    coefs = _coefficients(r)
    try:
        terms = [coefs[l - 1] * s**l for l in range(1, r + 1)]
    except OverflowError as exc:
        raise EvaluationRangeError(f"f_r overflow at s={s}, r={r}") from exc
    total = math.fsum(terms)
    if math.isinf(total):
        raise EvaluationRangeError(f"f_r overflow at s={s}, r={r}")
    return total


def f_r_prime(s, r):
    """Derivative of f_r: sum of l * s^(l-1) * a_l / l!."""
    _check_poly_args(s, r)
    coefs = _coefficients(r)
    try:
        terms = [coefs[l - 1] * l * s ** (l - 1) for l in range(1, r + 1)]
    except OverflowError as exc:
        raise EvaluationRangeError(f"f_r_prime overflow at s={s}, r={r}") from exc
    total = math.fsum(terms)
    if math.isinf(total):
        raise EvaluationRangeError(f"f_r_prime overflow at s={s}, r={r}")
    return total


def _log_f_r_of_log(logs, r):
    # log(f_r(exp(logs))) by logsumexp directly in log-s
    exps = [l * logs + lc for l, lc in enumerate(_log_coefficients(r), start=1)]
    top = max(exps)
    return top + math.log(math.fsum(math.exp(e - top) for e in exps))


def log_f_r(s, r):
    """log(f_r(s)) evaluated stably in log space (for bound searches)."""
    if s <= 0.0:
        raise DomainError(f"s={s} not positive")
    if r < 1:
        raise DomainError(f"order r={r} must be at least 1")
    return _log_f_r_of_log(math.log(s), r)


def tree_w(s):
    """The branch of w*exp(-w) = s with w in [0, 1], for s in [0, 1/e].

    Safeguarded Newton iteration: steps that leave the current bracket fall
    back to bisection; iterate until the residual drops below 1e-14.
    """
    if not 0.0 <= s <= _INV_E:
        raise DomainError(f"s={s} outside [0, 1/e]")
    if s == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    w = s  # w = s + s^2 + ... so s is a decent start
    for _ in range(200):
        ew = math.exp(-w)
        resid = w * ew - s
        if abs(resid) <= _W_RESIDUAL:
            return w
        if resid > 0.0:
            hi = w
        else:
            lo = w
        deriv = (1.0 - w) * ew
        if deriv > 1e-12:
            step = w - resid / deriv
        else:
            step = 0.5 * (lo + hi)
        if not lo < step < hi:
            step = 0.5 * (lo + hi)
        w = step
    return w


def delta_r(s, r):
    """Truncation gap W(s) - s*f_r_prime(s) on (0, 1/e].

    The gap is a positive tail series; values within solver noise of zero
    are clamped to zero.
    """
    if not 0.0 < s <= _INV_E:
        raise DomainError(f"s={s} outside (0, 1/e]")
    gap = tree_w(s) - s * f_r_prime(s, r)
    if gap < 0.0:
        if gap < -1e-11:
            raise ArithmeticError(
                f"truncation gap {gap} significantly negative at s={s}, r={r}"
            )
        return 0.0
    return gap


def theta_of_s(s, r):
    """Stationarity fraction f_r(s) / (s * f_r_prime(s)); strictly decreasing
    in s, from 1 at s=0+ down to 1/r."""
    if s <= 0.0:
        raise DomainError(f"s={s} not positive")
    return f_r(s, r) / (s * f_r_prime(s, r))


def saddle_objective(s, theta, alpha, r):
    """-theta*log(alpha) - theta*log(theta) + theta + theta*log(f_r(s)) - log(s)."""
    if s <= 0.0:
        raise DomainError(f"s={s} not positive")
    if theta <= 0.0:
        raise DomainError(f"theta={theta} not positive")
    if alpha <= 0.0:
        raise DomainError(f"alpha={alpha} not positive")
    return (
        -theta * math.log(alpha)
        - theta * math.log(theta)
        + theta
        + theta * math.log(f_r(s, r))
        - math.log(s)
    )


@dataclass(frozen=True)
class SaddlePoint:
    r: int
    alpha: float
    s: float
    theta: float
    value: float


def saddle_limits(alpha):
    """Large-order limits of the saddle point: (s, theta, value).

    s tends to alpha*exp(-alpha) below alpha=1 and to 1/e above; theta to
    1 - alpha/2 below and 1/(2*alpha) above; the value to
    1 + alpha/2 - log(alpha) + psi(alpha) on both branches.
    """
    if alpha <= 0.0:
        raise DomainError(f"alpha={alpha} not positive")
    if alpha <= 1.0:
        s_lim = alpha * math.exp(-alpha)
        theta_lim = 1.0 - 0.5 * alpha
    else:
        s_lim = _INV_E
        theta_lim = 0.5 / alpha
    value_lim = 1.0 + 0.5 * alpha - math.log(alpha) + psi(alpha)
    return s_lim, theta_lim, value_lim


def solve_saddle(alpha, r):
    """Stationary point of the saddle objective at truncation order r.

    s solves s*f_r_prime(s) = alpha (the map is strictly increasing, so
    bisection on a geometrically grown bracket); theta = f_r(s)/alpha.
    """
    if alpha <= 0.0:
        raise DomainError(f"alpha={alpha} not positive")
    if r < 2:
        raise DomainError(f"order r={r} must be at least 2")

    def climb(s):
        return s * f_r_prime(s, r) - alpha

    hi = _INV_E
    try:
        grown = 0
        while climb(hi) <= 0.0:
            hi *= 1.25
            grown += 1
            if grown > 4000:
                raise EvaluationRangeError(
                    f"no bracket for alpha={alpha} at order r={r}"
                )
    except OverflowError as exc:
        raise EvaluationRangeError(
            f"no bracket for alpha={alpha} at order r={r}"
        ) from exc
    s_r = bisect_root(climb, 1e-300, hi, tol=_SADDLE_TOL)
    theta_r = f_r(s_r, r) / alpha
    value = saddle_objective(s_r, theta_r, alpha, r)
    return SaddlePoint(r=r, alpha=alpha, s=s_r, theta=theta_r, value=value)


def discretize_fraction(theta, n):
    """floor(theta*n)/n, the lattice fraction used at finite n."""
    if n < 1:
        raise DomainError(f"n={n} must be at least 1")
    return math.floor(theta * n) / n


def discrete_saddle(alpha, r, n):
    """Finite-n saddle: snap theta to the n-lattice below the continuum value,
    then minimise the objective over s at that fixed fraction.

    The minimiser solves theta_of_s(s) = theta, a strictly decreasing
    equation, so bisection applies.
    """
    if n < r:
        raise DomainError(f"n={n} smaller than order r={r}")
    base = solve_saddle(alpha, r)
    theta_n = discretize_fraction(base.theta, n)
    if theta_n <= 1.0 / r:
        raise DomainError(
            f"lattice fraction {theta_n} at or below 1/r; no interior minimiser"
        )

    def gap(s):
        return theta_of_s(s, r) - theta_n

    lo = base.s
    while gap(lo) <= 0.0:
        lo *= 0.5
    hi = base.s
    while gap(hi) >= 0.0:
        hi *= 1.25
    s_n = bisect_root(gap, lo, hi, tol=_SADDLE_TOL)
    value = saddle_objective(s_n, theta_n, alpha, r)
    return SaddlePoint(r=r, alpha=alpha, s=s_n, theta=theta_n, value=value)


# ---------------------------------------------------------------------------
# Exact multiplicity sums and their polynomial bound


@lru_cache(maxsize=None)
def _q_recursive(n, k, cap):
    # sum over multiplicity vectors of components: exactly k parts of total
    # size n, each part at most cap, weighted by prod (a_l/l!)^m_l / m_l!
    # (lru_cache is lock-protected, so concurrent callers are safe)
    if n == 0:
        return Fraction(1) if k == 0 else Fraction(0)
    if k <= 0 or cap <= 0 or cap * k < n or k > n:
        return Fraction(0)
    coef = _coefficient_fractions(cap)[cap - 1]
    total = Fraction(0)
    power = Fraction(1)
    fact = 1
    for m in range(0, min(k, n // cap) + 1):
        if m > 0:
            power *= coef
            fact *= m
        sub = _q_recursive(n - m * cap, k - m, cap - 1)
        if sub:
            total += power / fact * sub
    return total


def q_nkr_exact(n, k, r):
    """Exact rational value of the multiplicity sum."""
    if not 1 <= k <= n:
        raise DomainError(f"k={k} outside 1..n={n}")
    if r < 1:
        raise DomainError(f"cap r={r} must be at least 1")
    return _q_recursive(n, k, min(r, n))


def q_nkr(n, k, r):
    """Sum over component-size multiplicity vectors with k parts of total
    size n, parts capped at r, of prod (a_l/l!)^m_l / m_l!.

    Computed by exact rational recursion; infeasible (n, k, r) return 0.
    """
    return float(q_nkr_exact(n, k, r))


def q_upper_bound(n, k, r):
    """Polynomial bound (1/k!) * inf_{s>0} f_r(s)^k / s^n.

    The infimum is located on log-scale: a coarse scan of log(s) in [-30, 10]
    brackets the minimum and golden-section refines it; this also covers the
    boundary-infimum cases (k = n and r*k < n) at the window edges.
    """
    if not 1 <= k <= n:
        raise DomainError(f"k={k} outside 1..n={n}")
    if r < 1:
        raise DomainError(f"cap r={r} must be at least 1")

    def objective(t):
        return k * _log_f_r_of_log(t, r) - n * t

    lo, hi = -30.0, 10.0
    coarse = 160
    ts = [lo + (hi - lo) * i / coarse for i in range(coarse + 1)]
    vals = [objective(t) for t in ts]
    i_best = min(range(len(ts)), key=vals.__getitem__)
    bl = ts[max(i_best - 1, 0)]
    bh = ts[min(i_best + 1, coarse)]
    _, ref = golden_section_min(objective, bl, bh, tol=1e-10)
    log_min = min(ref, vals[i_best])
    if k <= 170:
        # exact factorial keeps the bound tight at the n=k equality case
        return math.exp(log_min) / math.factorial(k)
    return math.exp(log_min - math.lgamma(k + 1))


def acyclic_partition_identity(n, lam, q, r):
    """Rearranged weight of the acyclic-and-bounded event:

    n! * (lam/n)^n * (1-lam/n)^(C(n,2)-n)
      * sum_k (lam/n)^(-k) * (q*(1-lam/n))^k * q_nkr(n, k, r).

    Must reproduce the exact enumeration of the same event at small n.
    """
    if n < 1:
        raise DomainError(f"n={n} must be at least 1")
    if not 0.0 < lam < n:
        raise DomainError(f"lambda={lam} outside (0, n)")
    if q <= 0.0:
        raise DomainError(f"q={q} not positive")
    if r < 1:
        raise DomainError(f"cap r={r} must be at least 1")
    p = lam / n
    pairs = n * (n - 1) // 2
    prefactor = math.factorial(n) * p**n * (1.0 - p) ** (pairs - n)
    terms = [
        p ** (-k) * (q * (1.0 - p)) ** k * q_nkr(n, k, r) for k in range(1, n + 1)
    ]
    return prefactor * math.fsum(terms)
