"""Parametric heavy-tailed laws.

Each model exposes its survival function, generalized-inverse quantile,
the b-function (inverse of 1/survival), and seeded inverse-transform
sampling. All draws are reproducible from a 64-bit seed via a
counter-based generator.
"""

from __future__ import annotations

import cmath
import math
import operator
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .special_functions import DEFAULT_TOLERANCE, Tolerance

_INV_E = math.exp(-1.0)

_MODEL_KINDS = ("pareto", "hallweiss", "hillhorror", "logerlang21", "slowvarlog")


@dataclass(frozen=True)
class TailModel:
    """A heavy-tailed law with survival function regularly varying at -alpha.

    Build instances through the named constructors; they validate the
    parameters and pin the support endpoint x_min.
    """

    kind: str
    alpha: float
    x_min: float
    delta: float = 1.0
    rho: float = -1.0

    @property
    def gamma(self) -> float:
        return 1.0 / self.alpha

    @classmethod
    def pareto(cls, alpha: float, delta: float = 1.0) -> "TailModel":
        if alpha <= 0.0:
            raise ValueError("pareto: alpha must be positive")
        if delta <= 0.0:
            raise ValueError("pareto: delta must be positive")
        return cls(kind="pareto", alpha=float(alpha), x_min=float(delta), delta=float(delta))

    @classmethod
    def hall_weiss(cls, alpha: float, rho: float) -> "TailModel":
        if alpha <= 0.0:
            raise ValueError("hallweiss: alpha must be positive")
        if rho >= 0.0:
            raise ValueError("hallweiss: rho must be negative")
        return cls(kind="hallweiss", alpha=float(alpha), x_min=1.0, rho=float(rho))

    @classmethod
    def hill_horror(cls, alpha: float) -> "TailModel":
        if alpha <= 0.0:
            raise ValueError("hillhorror: alpha must be positive")
        # quantile(0) = 0, so the support starts at zero here
        return cls(kind="hillhorror", alpha=float(alpha), x_min=0.0)

    @classmethod
    def log_erlang21(cls) -> "TailModel":
        return cls(kind="logerlang21", alpha=1.0, x_min=1.0)

    @classmethod
    def slow_var_log(cls) -> "TailModel":
        return cls(kind="slowvarlog", alpha=1.0, x_min=math.e)

    @classmethod
    def from_spec(cls, text: str) -> "TailModel":
        """Parse a model string such as 'pareto:alpha=2,delta=1'."""
        name, _, argpart = text.strip().partition(":")
        name = name.strip().lower()
        if name not in _MODEL_KINDS:
            raise ValueError(f"unknown model {name!r}, expected one of {_MODEL_KINDS}")
        kwargs = {}
        if argpart.strip():
            for item in argpart.split(","):
                key, eq, val = item.partition("=")
                if not eq:
                    raise ValueError(f"bad model argument {item!r}, expected key=value")
                try:
                    kwargs[key.strip()] = float(val)
                except ValueError:
                    raise ValueError(f"bad numeric value in model argument {item!r}") from None
        ctor = {
            "pareto": cls.pareto,
            "hallweiss": cls.hall_weiss,
            "hillhorror": cls.hill_horror,
            "logerlang21": cls.log_erlang21,
            "slowvarlog": cls.slow_var_log,
        }[name]
        try:
            return ctor(**kwargs)
        except TypeError as exc:
            raise ValueError(f"bad arguments for model {name!r}: {exc}") from None

    def spec_string(self) -> str:
        if self.kind == "pareto":
            return f"pareto:alpha={self.alpha:g},delta={self.delta:g}"
        if self.kind == "hallweiss":
            return f"hallweiss:alpha={self.alpha:g},rho={self.rho:g}"
        if self.kind == "hillhorror":
            return f"hillhorror:alpha={self.alpha:g}"
        return self.kind


def validate_seed(seed) -> int:
    """Check that seed is an integer representable in 64 unsigned bits."""
    try:
        s = operator.index(seed)
    except TypeError:
        raise ValueError(f"seed must be an integer, got {seed!r}") from None
    if not 0 <= s < 2**64:
        raise ValueError("seed must lie in [0, 2^64)")
    return s


def _hh_quantile(alpha: float, u) -> float:
    # quantile of the horror law, vectorized over u in [0, 1)
    return (1.0 - u) ** (-1.0 / alpha) * (-np.log1p(-u))


def _hh_quantile_scalar(alpha: float, u: float) -> float:
    return (1.0 - u) ** (-1.0 / alpha) * (-math.log1p(-u))


def tail(model: TailModel, x: float) -> float:
    """Survival function P(X > x); 1 at or below the support endpoint."""
    if x <= model.x_min:
        return 1.0
    k = model.kind
    if k == "pareto":
        return (model.delta / x) ** model.alpha
    if k == "hallweiss":
        return (1.0 + x**model.rho) / (2.0 * x**model.alpha)
    if k == "logerlang21":
        return (1.0 + math.log(x)) / x
    if k == "slowvarlog":
        return math.e * math.log(x) / x
    # horror law: invert the quantile by bisection in u
    lo_u, hi_u = 0.0, 1.0 - 1e-15
    if x >= _hh_quantile_scalar(model.alpha, hi_u):
        return 1.0 - hi_u
    for _ in range(200):
        mid = 0.5 * (lo_u + hi_u)
        if _hh_quantile_scalar(model.alpha, mid) >= x:
            hi_u = mid
        else:
            lo_u = mid
    return 1.0 - hi_u


def _tail_array(model: TailModel, x: np.ndarray) -> np.ndarray:
    # vectorized survival for the variants with an explicit formula;
    # values at or below x_min are clamped to 1
    k = model.kind
    with np.errstate(divide="ignore", invalid="ignore"):
        if k == "pareto":
            t = (model.delta / x) ** model.alpha
        elif k == "hallweiss":
            t = (1.0 + x**model.rho) / (2.0 * x**model.alpha)
        elif k == "logerlang21":
            t = (1.0 + np.log(x)) / x
        elif k == "slowvarlog":
            t = math.e * np.log(x) / x
        else:
            raise ValueError(f"no array tail for {k}")
    return np.where(x <= model.x_min, 1.0, t)


def _bisect_tail(model: TailModel, s: np.ndarray) -> np.ndarray:
    """Upper endpoints x with tail(x) <= s, elementwise, by array bisection."""
    s = np.asarray(s, dtype=float)
    lo = np.full(s.shape, model.x_min, dtype=float)
    hi = np.full(s.shape, model.x_min * 2.0, dtype=float)
    # grow brackets by doubling until the tail has crossed below s
    for _ in range(1100):
        above = _tail_array(model, hi) > s
        if not above.any():
            break
        lo = np.where(above, hi, lo)
        hi = np.where(above, np.minimum(hi * 2.0, 8e307), hi)
    else:
        raise ArithmeticError("tail bisection could not bracket the target")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        above = _tail_array(model, mid) > s
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return hi


def quantile(model: TailModel, u: float) -> float:
    """Generalized inverse of the cdf at u in [0, 1)."""
    if not 0.0 <= u < 1.0:
        raise ValueError("quantile: u must lie in [0, 1)")
    k = model.kind
    if k == "pareto":
        q = model.delta * (1.0 - u) ** (-1.0 / model.alpha)
    elif k == "hillhorror":
        q = _hh_quantile_scalar(model.alpha, u)
    elif u == 0.0:
        return model.x_min
    else:
        q = float(_bisect_tail(model, np.asarray(1.0 - u))[()])
    # nudge up so the computed cdf round-trips to at least u; the
    # comparison is on 1 - tail, not on tail, to match the invariant
    # under floating-point rounding
    for _ in range(100):
        if 1.0 - tail(model, q) >= u:
            break
        q = math.nextafter(q, math.inf)
    return q


def _quantile_array(model: TailModel, u: np.ndarray) -> np.ndarray:
    k = model.kind
    if k == "pareto":
        return model.delta * (1.0 - u) ** (-1.0 / model.alpha)
    if k == "hillhorror":
        return np.asarray(_hh_quantile(model.alpha, u), dtype=float)
    return _bisect_tail(model, 1.0 - u)


def _lambert_wm1(z: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    # lower real branch of Lambert W on [-1/e, 0); private because only
    # the log-law b functions need it
    if math.isnan(z) or z >= 0.0 or z < -_INV_E - tol.abs_tol:
        raise ValueError(f"lambert w lower branch needs -1/e <= z < 0, got {z!r}")
    if z <= -_INV_E + 1e-15:
        return -1.0
    if z < -0.25:
        p = math.sqrt(2.0 * (1.0 + math.e * z))
        w = -1.0 - p - p * p / 3.0 - 11.0 * p**3 / 72.0
    else:
        lz = math.log(-z)
        w = lz - math.log(-lz)
    for _ in range(tol.max_iter):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        if wp1 >= 0.0:
            return -1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        w_new = w - f / denom
        if w_new > -1.0:
            # damp an overshoot across the branch point
            w_new = 0.5 * (w - 1.0)
        if abs(w_new - w) <= tol.abs_tol + tol.rel_tol * abs(w_new):
            return min(w_new, -1.0)
        w = w_new
    return min(w, -1.0)


def b_function(model: TailModel, t: float) -> float:
    """Value b with 1/tail(b) = t, the quantile at level 1 - 1/t."""
    if math.isnan(t) or t < 1.0:
        raise ValueError("b_function: need t >= 1, the range of 1/tail")
    k = model.kind
    if k == "pareto":
        return model.delta * t ** (1.0 / model.alpha)
    if k == "hillhorror":
        return t ** (1.0 / model.alpha) * math.log(t)
    if k == "logerlang21":
        return -t * _lambert_wm1(-1.0 / (math.e * t))
    if k == "slowvarlog":
        return -math.e * t * _lambert_wm1(-1.0 / (math.e * t))
    a, r = model.alpha, model.rho
    if (a, r) == (1.0, -1.0):
        return (t + math.sqrt(t * t + 8.0 * t)) / 4.0
    if (a, r) == (2.0, -1.0):
        # largest real root of 2 b^3 - t b - t = 0; the principal complex
        # cube root keeps the Cardano expression valid when the
        # discriminant goes negative
        c = (54.0 * t + 6.0 * cmath.sqrt(81.0 * t * t - 6.0 * t**3)) ** (1.0 / 3.0)
        return (c / 6.0 + t / c).real
    if (a, r) == (1.0, -2.0):
        # real root of 2 b^3 - t b^2 - t = 0, radicand is always positive
        c = (t**3 + 54.0 * t + 6.0 * math.sqrt(81.0 * t * t + 3.0 * t**4)) ** (1.0 / 3.0)
        return c / 6.0 + t * t / (6.0 * c) + t / 6.0
    return float(_bisect_tail(model, np.asarray(1.0 / t))[()])


def sample(model: TailModel, n: int, seed) -> np.ndarray:
    """n i.i.d. draws by inverse transform of a Philox uniform stream."""
    if n < 1:
        raise ValueError("sample: n must be at least 1")
    key = validate_seed(seed)
    g = Generator(Philox(key=key))
    u = g.random(int(n))
    # u = 0 would land exactly on the support endpoint (zero for the
    # horror law); nudge to the smallest positive uniform instead
    u = np.where(u == 0.0, 2.0**-53, u)
    return _quantile_array(model, u)


def u_function(model: TailModel, n: float) -> float:
    """Quantile at level 1 - 1/n, the typical size of the sample maximum."""
    if not n > 1.0:
        raise ValueError("u_function: need n > 1")
    if model.kind == "hillhorror":
        return n ** (1.0 / model.alpha) * math.log(n)
    if n > 1e15:
        # 1 - 1/n would round to 1; the b function is the same map
        return b_function(model, n)
    return quantile(model, 1.0 - 1.0 / n)
