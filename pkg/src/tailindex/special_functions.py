"""Self-contained special functions used across the package.

All routines are pure functions with no shared state. Nothing here
imports scipy; the test suite cross-checks these implementations
against independent references instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_INV_E = math.exp(-1.0)
_SQRT2 = math.sqrt(2.0)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Tolerance:
    """Convergence budget for the iterative routines."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iter: int = 100

    def __post_init__(self):
        if self.abs_tol < 0.0 or self.rel_tol < 0.0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol + self.rel_tol <= 0.0:
            raise ValueError("abs_tol and rel_tol cannot both be zero")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


DEFAULT_TOLERANCE = Tolerance()


def lambert_w0(x: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Principal real branch of the Lambert W function.

    Solves w * exp(w) = x for x >= -1/e. Values within abs_tol below
    -1/e are clamped to the branch point; anything lower is a domain
    error. The result is always >= -1.
    """
    if math.isnan(x):
        raise ValueError("lambert_w0: x is nan")
    if x < -_INV_E - tol.abs_tol:
        raise ValueError(f"lambert_w0: x={x!r} is below -1/e")
    if x <= -_INV_E:
        return -1.0
    if x == 0.0:
        return 0.0

    if x >= math.e:
        # iterate on w + ln w = ln x, stays finite for huge x
        lx = math.log(x)
        llx = math.log(lx)
        w = lx - llx + llx / lx if llx > 0.0 else lx
        for _ in range(tol.max_iter):
            g = w + math.log(w) - lx
            gp = 1.0 + 1.0 / w
            gpp = -1.0 / (w * w)
            step = 2.0 * g * gp / (2.0 * gp * gp - g * gpp)
            w_new = w - step
            if abs(w_new - w) <= tol.abs_tol + tol.rel_tol * abs(w_new):
                return w_new
            w = w_new
        return w

    if x < -0.25:
        # series seed near the branch point; the radicand can round
        # a hair negative at x = -1/e
        p2 = max(2.0 * (1.0 + math.e * x), 0.0)
        p = math.sqrt(p2)
        w = -1.0 + p - p2 / 3.0 + 11.0 * p2 * p / 72.0
    else:
        w = x / (1.0 + x)

    for _ in range(tol.max_iter):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 <= 0.0:
            return -1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        w_new = w - f / denom
        if w_new < -1.0:
            # damp an overshoot past the branch point
            w_new = -1.0 + 0.5 * wp1
        if abs(w_new - w) <= tol.abs_tol + tol.rel_tol * abs(w_new):
            return max(w_new, -1.0)
        w = w_new
    return max(w, -1.0)


def irwin_hall_cdf(x: float, k: int) -> float:
    """CDF of the sum of k independent Uniform(0,1) variables.

    Alternating-sum formula with compensated summation, evaluated on
    the lower half via the symmetry F(x) = 1 - F(k - x); above k/2 the
    raw sum cancels catastrophically. k above 64 is rejected, the
    cancellation there is not worth fighting even on the lower half.
    """
    if k < 1:
        raise ValueError("irwin_hall_cdf: k must be a positive integer")
    if k > 64:
        raise ValueError("irwin_hall_cdf: k > 64 is not supported")
    if x <= 0.0:
        return 0.0
    if x >= k:
        return 1.0
    if x > 0.5 * k:
        return 1.0 - irwin_hall_cdf(k - x, k)
    j_max = int(math.floor(x))
    total = math.fsum(
        (-1.0) ** j * math.comb(k, j) * (x - j) ** k for j in range(j_max + 1)
    )
    val = total / math.factorial(k)
    return min(1.0, max(0.0, val))


_MACHINE_EPS = 2.220446049250313e-16


def _gamma_p_series(a: float, y: float, tol: Tolerance) -> float:
    # lower incomplete gamma by power series, valid for y < a + 1;
    # runs to machine precision, tol only budgets the iterations
    term = 1.0 / a
    total = term
    n = a
    for _ in range(tol.max_iter):
        n += 1.0
        term *= y / n
        total += term
        if abs(term) < abs(total) * _MACHINE_EPS:
            return total * math.exp(-y + a * math.log(y) - math.lgamma(a))
    raise ArithmeticError("gamma_cdf: series did not converge")


def _gamma_q_contfrac(a: float, y: float, tol: Tolerance) -> float:
    # upper tail by modified Lentz continued fraction, valid for y >= a + 1
    tiny = 1e-300
    b = y + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, tol.max_iter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _MACHINE_EPS:
            return h * math.exp(-y + a * math.log(y) - math.lgamma(a))
    raise ArithmeticError("gamma_cdf: continued fraction did not converge")


def gamma_cdf(
    x: float, shape: float, rate: float, tol: Tolerance = DEFAULT_TOLERANCE
) -> float:
    """Regularized lower incomplete gamma, P(shape, rate * x)."""
    if shape <= 0.0 or rate <= 0.0:
        raise ValueError("gamma_cdf: shape and rate must be positive")
    y = rate * x
    if y <= 0.0:
        return 0.0
    if y < shape + 1.0:
        return min(1.0, _gamma_p_series(shape, y, tol))
    return max(0.0, 1.0 - _gamma_q_contfrac(shape, y, tol))


def std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


# Acklam's rational approximation to the standard normal quantile,
# refined below by one Halley step against std_normal_cdf.
_ACKLAM_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ACKLAM_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ACKLAM_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ACKLAM_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)
_ACKLAM_P_LOW = 0.02425


def std_normal_quantile(q: float) -> float:
    """Inverse of std_normal_cdf on (0,1)."""
    if not 0.0 < q < 1.0:
        raise ValueError("std_normal_quantile: q must lie strictly in (0,1)")
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    if q < _ACKLAM_P_LOW:
        r = math.sqrt(-2.0 * math.log(q))
        x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) / (
            (((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0
        )
    elif q > 1.0 - _ACKLAM_P_LOW:
        r = math.sqrt(-2.0 * math.log(1.0 - q))
        x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) / (
            (((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0
        )
    else:
        u = q - 0.5
        r = u * u
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u / (
            ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
        )
    if x * x < 1400.0:
        # one Halley step, exp(x^2/2) stays finite in this range
        e = std_normal_cdf(x) - q
        u = e * _SQRT_TWO_PI * math.exp(0.5 * x * x)
        x -= u / (1.0 + 0.5 * x * u)
    return x


def ks_statistic(sorted_sample, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov distance of a sorted sample to a cdf.

    sup over i of max(|i/m - cdf(x_i)|, |(i-1)/m - cdf(x_i)|).
    """
    m = len(sorted_sample)
    if m == 0:
        raise ValueError("ks_statistic: empty sample")
    prev = -math.inf
    d = 0.0
    for i, v in enumerate(sorted_sample, start=1):
        v = float(v)
        if v < prev:
            raise ValueError("ks_statistic: sample must be sorted ascending")
        prev = v
        f = float(cdf(v))
        d = max(d, abs(i / m - f), abs((i - 1) / m - f))
    return d
