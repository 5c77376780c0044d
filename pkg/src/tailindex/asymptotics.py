"""Closed-form moments, asymptotic variances, and normal-theory tools.

The recurring argument pg is the product p * gamma; every routine
enforces its own domain (pg < 1, < 1/2, or < 1/3).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .estimators import EstimateResult
from .special_functions import std_normal_quantile

PHI_AT_ZERO = 12.0 / math.e - 2.0


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie in (0, 1)")
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")


def moment_u_power(s: int, pg: float) -> float:
    """E U^(-s*pg) for U uniform: 1/(1 - s*pg), valid for s*pg < 1."""
    if s < 1:
        raise ValueError("s must be a positive integer")
    if s * pg >= 1.0:
        raise ValueError(f"need s*pg < 1, got {s * pg}")
    return 1.0 / (1.0 - s * pg)


def variance_u_power(pg: float) -> float:
    """Var U^(-pg): pg^2 / ((1-2pg)(1-pg)^2), valid for pg < 1/2."""
    if pg >= 0.5:
        raise ValueError(f"need pg < 1/2, got {pg}")
    return pg * pg / ((1.0 - 2.0 * pg) * (1.0 - pg) ** 2)


def log_moments(gamma: float):
    """Mean and variance of ln U^(-gamma): (gamma, gamma^2)."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    return gamma, gamma * gamma


def asymptotic_sd(p: float, gamma: float) -> float:
    """Limit standard deviation gamma(1-pg)/sqrt(1-2pg); gamma at p=0."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    pg = p * gamma
    if pg >= 0.5:
        raise ValueError(f"need p*gamma < 1/2, got {pg}")
    return gamma * (1.0 - pg) / math.sqrt(1.0 - 2.0 * pg)


def third_central_moment_std(pg: float) -> float:
    """E Z^3 of the standardized power summand: 2 sqrt(1-2pg)(1+pg)/(1-3pg)."""
    if pg >= 1.0 / 3.0:
        raise ValueError(f"need pg < 1/3, got {pg}")
    return 2.0 * math.sqrt(1.0 - 2.0 * pg) * (1.0 + pg) / (1.0 - 3.0 * pg)


def berry_esseen_phi(pg: float) -> float:
    """E |Z|^3 of the standardized power summand.

    Closed form away from zero; the removable singularity at pg = 0 is
    special-cased to its limit 12/e - 2.
    """
    if pg >= 1.0 / 3.0:
        raise ValueError(f"need pg < 1/3, got {pg}")
    if pg == 0.0:
        return PHI_AT_ZERO
    # (1-pg)^(1/pg - 1) through log1p keeps small pg accurate
    powterm = math.exp((1.0 / pg - 1.0) * math.log1p(-pg))
    return (
        -2.0
        * math.sqrt(1.0 - 2.0 * pg)
        / (1.0 - 3.0 * pg)
        * (pg + 1.0 - 6.0 * powterm)
    )


def optimal_p_berry_esseen(gamma: float, tol: float = 1e-10) -> float:
    """p minimizing berry_esseen_phi(p*gamma), by scan plus golden section."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    lo_x, hi_x = -50.0, 0.33
    grid = [lo_x + (hi_x - lo_x) * i / 499 for i in range(500)]
    vals = [berry_esseen_phi(x) for x in grid]
    i_min = vals.index(min(vals))
    if i_min in (0, len(grid) - 1):
        raise ArithmeticError("berry-esseen minimizer hit the scan boundary")
    a, b = grid[i_min - 1], grid[i_min + 1]
    # golden-section search on the bracketing triple
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = berry_esseen_phi(c), berry_esseen_phi(d)
    for _ in range(200):
        if b - a <= tol:
            return 0.5 * (a + b) / gamma
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = berry_esseen_phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = berry_esseen_phi(d)
    raise ArithmeticError("golden-section search did not converge")


def berry_esseen_superiority_interval():
    """Maximal interval (x_low, 0) of pg where phi is below phi(0)."""
    target = PHI_AT_ZERO
    lo, hi = -20.0, -0.5
    if berry_esseen_phi(lo) <= target or berry_esseen_phi(hi) >= target:
        raise ArithmeticError("superiority root is not bracketed in [-20, -0.5]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if berry_esseen_phi(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), 0.0


def paulauskas_p_star(gamma: float, rho: float) -> float:
    """Competitor tuning value (2 - rho*gamma - sqrt((2-rho*gamma)^2 - 2))/(2 gamma)."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if rho > 0.0:
        raise ValueError("rho must be non-positive")
    q = 2.0 - rho * gamma
    return (q - math.sqrt(q * q - 2.0)) / (2.0 * gamma)


def confidence_interval(gamma_hat: float, k: int, level: float = 0.95) -> ConfidenceInterval:
    """Normal-approximation interval for gamma around a Hill-type estimate.

    (g/(z/sqrt(k) + 1), g/(-z/sqrt(k) + 1)); requires sqrt(k) > z so the
    upper denominator stays positive.
    """
    if gamma_hat < 0.0:
        raise ValueError("gamma_hat must be non-negative")
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    z = std_normal_quantile(1.0 - (1.0 - level) / 2.0)
    rk = math.sqrt(k)
    if rk <= z:
        raise ValueError(
            f"k={k} is too small for level {level}: need sqrt(k) > z={z:.4f}"
        )
    lower = gamma_hat / (z / rk + 1.0)
    upper = gamma_hat / (-z / rk + 1.0)
    return ConfidenceInterval(lower=lower, upper=upper, level=level)


def normalized_statistic(value: float, kind: str, k: int, p: float, gamma: float) -> float:
    """Z-score of an estimator value under its limiting normal law.

    kinds: 'hill' for the log estimator, 'h' for the raw power mean,
    'gh' for the power-mean tail estimate. The 'h' scale uses |pg| so
    the result is a proper z-score for either sign of p.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if k < 1:
        raise ValueError("k must be at least 1")
    rk = math.sqrt(k)
    if kind == "hill":
        return rk * (value - gamma) / gamma
    pg = p * gamma
    if pg >= 0.5:
        raise ValueError(f"need p*gamma < 1/2, got {pg}")
    if kind == "h":
        if p == 0.0:
            raise ValueError("kind 'h' needs p != 0")
        center = 1.0 / (1.0 - pg)
        scale = abs(pg) / (math.sqrt(1.0 - 2.0 * pg) * (1.0 - pg))
        return rk * (value - center) / scale
    if kind == "gh":
        return rk * (value - gamma) / asymptotic_sd(p, gamma)
    raise ValueError(f"unknown kind {kind!r}, expected hill, h, or gh")


def with_asymptotics(result: EstimateResult, level: float = 0.95):
    """Fill std_err and ci on an estimate where the theory applies.

    Returns (annotated result, notes); notes maps a field name to the
    reason it stayed empty.
    """
    notes = {}
    p, k = result.spec.p, result.spec.k
    g = result.gamma_hat
    if g <= 0.0:
        std_err = None
        notes["std_err"] = "gamma_hat is zero, the limit law is degenerate"
    elif p * g >= 0.5:
        std_err = None
        notes["std_err"] = f"p*gamma_hat = {p * g:.4f} is not below 1/2"
    else:
        std_err = asymptotic_sd(p, g) / math.sqrt(k)
    try:
        ci = confidence_interval(g, k, level)
        ci_pair = (ci.lower, ci.upper)
    except ValueError as exc:
        ci_pair = None
        notes["ci"] = str(exc)
    return dataclasses.replace(result, std_err=std_err, ci=ci_pair), notes
