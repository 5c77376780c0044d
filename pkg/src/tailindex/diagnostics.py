"""Plot-series builders, law-verification harnesses, and second-order
tail diagnostics.

The integral diagnostics (J, the two gamma representations, their gap,
and the Davis-Resnick a*) quantify how far a model's tail is from exact
Pareto behavior; the simulation harnesses check the finite-k laws of
the estimators directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .distributions import (
    TailModel,
    _quantile_array,
    b_function,
    tail,
    u_function,
    validate_seed,
)
from .estimators import Sample, generalized_hill
from .series import PlotSeries
from .special_functions import (
    Tolerance,
    gamma_cdf,
    irwin_hall_cdf,
    ks_statistic,
    std_normal_quantile,
)


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


# the s = b/(1-v) substitution maps [b, inf) onto [0, 1); integrands of
# regularly varying tails become integrable there
_QUAD_ABS = 1e-12
_QUAD_REL = 1e-9


def _quad01(fn, what: str) -> float:
    out = integrate.quad(
        fn, 0.0, 1.0, epsabs=_QUAD_ABS, epsrel=_QUAD_REL, limit=200, full_output=1
    )
    if len(out) > 3:
        value, abserr = out[0], out[1]
        raise QuadratureError(
            f"{what}: {out[3]} (value {value!r}, error estimate {abserr!r})"
        )
    return float(out[0])


def _curve_name(p: float) -> str:
    return "hill" if p == 0.0 else f"gh_p{p:g}"


def fixed_k_series(observations: Sample, k: int, p_list) -> PlotSeries:
    """Estimates at fixed k while n grows through the data.

    For each n in [k+1, N] the estimators run on the first n
    observations in arrival order.
    """
    n_total = observations.n
    if k + 1 > n_total:
        raise ValueError(f"need k + 1 <= n, got k={k}, n={n_total}")
    powers = []
    for p in p_list:
        p = float(p)
        if p != 0.0 and p not in powers:
            powers.append(p)
    ns = np.arange(k + 1, n_total + 1)
    curves = {"hill": np.empty(ns.size)}
    for p in powers:
        curves[_curve_name(p)] = np.empty(ns.size)
    vals = observations.values
    for i, n in enumerate(ns):
        prefix = Sample(vals[:n])
        curves["hill"][i] = generalized_hill(prefix, k, 0.0).gamma_hat
        for p in powers:
            curves[_curve_name(p)][i] = generalized_hill(prefix, k, p).gamma_hat
    meta = {
        "kind": "fixed_k",
        "k": str(k),
        "semantics": "estimates use the first n observations in arrival order",
    }
    return PlotSeries(x=ns.astype(float), curves=curves, meta=meta)


def hill_plot_series(sample: Sample, p: float, level: float = 0.95) -> PlotSeries:
    """Hill and power-p curves over k = 1..n-1, with a normal band.

    The band applies to the Hill curve and is present only where the
    interval's k-precondition sqrt(k) > z holds; elsewhere it is NaN.
    """
    n = sample.n
    if n < 3:
        raise ValueError(f"need n >= 3, got n={n}")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    ys = sample.sorted[::-1]
    logs = np.log(ys)
    ks = np.arange(1, n, dtype=float)
    hill = np.maximum(np.cumsum(logs)[:-1] / ks - logs[1:], 0.0)
    if p == 0.0:
        other = hill
    else:
        pw = ys**p
        h = np.cumsum(pw)[:-1] / (ks * pw[1:])
        other = np.maximum((1.0 - 1.0 / h) / p, 0.0)
    z = std_normal_quantile(1.0 - (1.0 - level) / 2.0)
    rk = np.sqrt(ks)
    lo = np.full(ks.size, math.nan)
    hi = np.full(ks.size, math.nan)
    ok = rk > z
    lo[ok] = hill[ok] / (z / rk[ok] + 1.0)
    hi[ok] = hill[ok] / (1.0 - z / rk[ok])
    curves = {"hill": hill, _curve_name(p): other} if p != 0.0 else {"hill": hill}
    meta = {
        "kind": "hill_plot",
        "n": str(n),
        "p": repr(float(p)),
        "level": repr(float(level)),
        "band": "hill normal interval where sqrt(k) exceeds the z quantile",
    }
    return PlotSeries(x=ks, curves=curves, band=(lo, hi), meta=meta)


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int
    subsample_fraction: float
    exceedance_target: int
    k: int
    seed: int

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not 0.0 < self.subsample_fraction <= 1.0:
            raise ValueError("subsample_fraction must lie in (0, 1]")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.exceedance_target <= self.k:
            raise ValueError("exceedance_target must exceed k")
        object.__setattr__(self, "seed", validate_seed(self.seed))


@dataclass(frozen=True)
class BootstrapReport:
    config: BootstrapConfig
    series: PlotSeries

    def __post_init__(self):
        c = self.series.curves
        if not (np.all(c["min"] <= c["mean"]) and np.all(c["mean"] <= c["max"])):
            raise ValueError("bootstrap band ordering violated")


def _top_exceedances(values: np.ndarray, m: int) -> np.ndarray:
    """Exactly the m largest values, kept in arrival order.

    Ties at the threshold are taken in arrival order until the quota
    fills.
    """
    srt = np.sort(values)
    cut = srt[-m]
    above = values > cut
    quota = m - int(above.sum())
    at_cut = np.flatnonzero(values == cut)[:quota]
    idx = np.sort(np.concatenate([np.flatnonzero(above), at_cut]))
    return values[idx]


def bootstrap_band(
    population: Sample, model_or_data: str, config: BootstrapConfig, p: float
) -> BootstrapReport:
    """Subsample-without-replacement band for the fixed-k curve.

    Replicate r draws floor(fraction*N) indices with the stream keyed
    by seed XOR r (r starting at 1), keeps the top exceedance_target
    exceedances in arrival order, and runs the fixed-k curve; the
    report aggregates elementwise min/mean/max.
    """
    n_pop = population.n
    sub_size = int(math.floor(config.subsample_fraction * n_pop))
    if sub_size < config.exceedance_target:
        raise ValueError(
            f"subsample size {sub_size} cannot yield "
            f"{config.exceedance_target} exceedances"
        )
    name = _curve_name(p)
    width = config.exceedance_target - config.k
    rows = np.empty((config.replicates, width))
    for r in range(1, config.replicates + 1):
        gen = np.random.Generator(np.random.Philox(key=config.seed ^ r))
        idx = np.sort(gen.choice(n_pop, size=sub_size, replace=False))
        sub = population.values[idx]
        exc = _top_exceedances(sub, config.exceedance_target)
        series = fixed_k_series(Sample(exc), config.k, [p])
        rows[r - 1] = series.curves[name]
    # mean via fsum so the reduction is order-independent
    mean = np.array([math.fsum(rows[:, j]) / config.replicates for j in range(width)])
    curves = {"min": rows.min(axis=0), "mean": mean, "max": rows.max(axis=0)}
    ns = np.arange(config.k + 1, config.exceedance_target + 1, dtype=float)
    meta = {
        "kind": "bootstrap_band",
        "source": model_or_data,
        "replicates": str(config.replicates),
        "subsample_fraction": repr(config.subsample_fraction),
        "exceedance_target": str(config.exceedance_target),
        "k": str(config.k),
        "seed": str(config.seed),
        "p": repr(float(p)),
        "semantics": "per replicate: sorted without-replacement subsample, "
        "top exceedances in arrival order, fixed-k prefix curve",
    }
    series = PlotSeries(x=ns, curves=curves, meta=meta)
    return BootstrapReport(config=config, series=series)


def _pareto_statistics(
    model: TailModel, k: int, p: float, n: int, replicates: int, gen
) -> np.ndarray:
    """Replicated top-k power means from full Pareto samples."""
    out = np.empty(replicates)
    rows = max(1, 2_000_000 // n)
    done = 0
    gamma = model.gamma
    while done < replicates:
        m = min(rows, replicates - done)
        u = gen.random((m, n))
        u[u == 0.0] = 2.0**-53
        x = model.delta * u**-gamma
        part = np.partition(x, n - k - 1, axis=1)
        pivot = part[:, n - k - 1]
        top = part[:, n - k :]
        if p == 0.0:
            out[done : done + m] = np.mean(
                np.log(top) - np.log(pivot)[:, None], axis=1
            )
        else:
            out[done : done + m] = np.mean((top / pivot[:, None]) ** p, axis=1)
        done += m
    return out


def _reference_power_mean_draws(pg: float, k: int, count: int, gen) -> np.ndarray:
    out = np.empty(count)
    rows = max(1, 2_000_000 // k)
    done = 0
    while done < count:
        m = min(rows, count - done)
        v = gen.random((m, k))
        v[v == 0.0] = 2.0**-53
        out[done : done + m] = np.mean(v**-pg, axis=1)
        done += m
    return out


def exact_law_check(
    model: TailModel, k: int, p: float, n: int, replicates: int, seed
) -> float:
    """KS distance of the simulated statistic to its exact finite-k law.

    Pareto only: p=0 tests the log estimator against Gamma(k, k*alpha),
    p=-alpha tests k*H against Irwin-Hall(k), any other p tests H
    against an oversampled direct simulation of the power mean.
    """
    if model.kind != "pareto":
        raise ValueError("exact_law_check applies to the pareto model only")
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= n-1, got k={k}, n={n}")
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    seed = validate_seed(seed)
    gen = np.random.Generator(np.random.Philox(key=seed))
    stats = _pareto_statistics(model, k, p, n, replicates, gen)
    if p == 0.0:
        # series length for the incomplete gamma grows with the shape
        tol = Tolerance(max_iter=max(200, 4 * k))
        ref = lambda w: gamma_cdf(w, float(k), k * model.alpha, tol)
        return ks_statistic(np.sort(stats), ref)
    if p == -model.alpha:
        return ks_statistic(np.sort(stats * k), lambda w: irwin_hall_cdf(w, k))
    ref_draws = np.sort(
        _reference_power_mean_draws(p * model.gamma, k, 10 * replicates, gen)
    )
    denom = ref_draws.size
    ref = lambda w: np.searchsorted(ref_draws, w, side="right") / denom
    return ks_statistic(np.sort(stats), ref)


def _top_order_uniforms(n: int, k: int, replicates: int, gen) -> np.ndarray:
    """Top k+1 uniform order statistics per replicate, descending.

    Column j holds U_(n-j) via the ratio recursion
    U_(n-j) = U_(n-j+1) * V^(1/(n-j)).
    """
    v = gen.random((replicates, k + 1))
    v[v == 0.0] = 2.0**-53
    u = np.empty_like(v)
    u[:, 0] = v[:, 0] ** (1.0 / n)
    for j in range(1, k + 1):
        u[:, j] = u[:, j - 1] * v[:, j] ** (1.0 / (n - j))
    return u


def limiting_law_check(
    model: TailModel, k: int, p: float, n_list, replicates: int, seed
):
    """KS distances of the statistic to its n -> infinity limit law.

    Simulates only the top k+1 order statistics per replicate, which
    carry the statistic exactly.
    """
    if p >= 0.0:
        raise ValueError("the limiting law is stated for p < 0")
    if k < 1:
        raise ValueError("k must be at least 1")
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    ns = [int(n) for n in n_list]
    for n in ns:
        if n < k + 1:
            raise ValueError(f"every n must be at least k+1, got n={n}, k={k}")
    seed = validate_seed(seed)
    gen = np.random.Generator(np.random.Philox(key=seed))
    pg = p * model.gamma
    if k == 1:
        ref = lambda w: min(1.0, max(0.0, w ** (-1.0 / pg))) if w > 0.0 else 0.0
    else:
        ref_draws = np.sort(
            _reference_power_mean_draws(pg, k, 10 * replicates, gen)
        )
        denom = ref_draws.size
        ref = lambda w: np.searchsorted(ref_draws, w, side="right") / denom
    distances = []
    for n in ns:
        u = _top_order_uniforms(n, k, replicates, gen)
        x = _quantile_array(model, u)
        pivot = x[:, k]
        h = np.mean((x[:, :k] / pivot[:, None]) ** p, axis=1)
        distances.append(ks_statistic(np.sort(h), ref))
    return distances


def _density(model: TailModel, s: float) -> float:
    kind = model.kind
    a = model.alpha
    if kind == "pareto":
        d = model.delta
        return a * d**a * s ** (-a - 1.0)
    if kind == "hallweiss":
        r = model.rho
        return 0.5 * (a * s ** (-a - 1.0) + (a - r) * s ** (r - a - 1.0))
    if kind == "logerlang21":
        return math.log(s) / (s * s)
    if kind == "slowvarlog":
        return math.e * (math.log(s) - 1.0) / (s * s)
    # no closed density; symmetric difference of the tail
    h = 1e-5 * s
    return (tail(model, s - h) - tail(model, s + h)) / (2.0 * h)


def second_order_j(model: TailModel, t: float, method: str = "auto") -> float:
    """J(t) = t * integral of (1 - F(s))/s over s >= b(t).

    Exactly 1/alpha for Pareto at every t; larger when the slowly
    varying factor still grows at b(t).
    """
    if method not in ("auto", "closed", "quad"):
        raise ValueError(f"unknown method {method!r}")
    if method != "quad":
        if model.kind == "pareto":
            return 1.0 / model.alpha
        if model.kind == "hallweiss" and model.alpha == 1.0 and model.rho == -1.0:
            b = b_function(model, t)
            return (t / 2.0) * (1.0 / b + 1.0 / (2.0 * b * b))
        if method == "closed":
            raise ValueError(f"no closed J for {model.spec_string()}")
    b = b_function(model, t)

    def integrand(v):
        return tail(model, b / (1.0 - v)) / (1.0 - v)

    return t * _quad01(integrand, f"J(t={t!r}) for {model.spec_string()}")


def c_curve(model: TailModel, n_list, k_rule) -> PlotSeries:
    """sqrt(k) * (J(n/k) - gamma) along n_list with k = k_rule(n)."""
    ns = [int(n) for n in n_list]
    vals = np.empty(len(ns))
    ks = np.empty(len(ns))
    for i, n in enumerate(ns):
        k = int(k_rule(n))
        if not 1 <= k < n:
            raise ValueError(f"k_rule gave k={k} for n={n}")
        ks[i] = k
        vals[i] = math.sqrt(k) * (second_order_j(model, n / k) - model.gamma)
    meta = {
        "kind": "c_curve",
        "model": model.spec_string(),
        "k": "k_rule(n), recorded in the k curve",
    }
    return PlotSeries(
        x=np.array(ns, dtype=float), curves={"c": vals, "k": ks}, meta=meta
    )


def gamma_repr_eq(model: TailModel, t: float) -> float:
    """t * integral of ln(s) dF(s) over s >= b(t)."""
    if t <= 1.0:
        raise ValueError("t must exceed 1")
    b = b_function(model, t)

    def integrand(v):
        s = b / (1.0 - v)
        return math.log(s) * _density(model, s) * b / (1.0 - v) ** 2

    return t * _quad01(integrand, f"gamma_eq(t={t!r}) for {model.spec_string()}")


def _log_u_slope(model: TailModel, s: float) -> float:
    # symmetric difference on the log-log scale; b is U here, and its
    # closed forms keep the difference quotient smooth where the
    # 1 - 1/s level would quantize it
    h = 1e-4
    up = math.log(b_function(model, s * math.exp(h)))
    dn = math.log(b_function(model, s * math.exp(-h)))
    return (up - dn) / (2.0 * h)


def gamma_repr_alt(model: TailModel, t: float) -> float:
    """t * integral over s >= t of d(ln U(s))/ds / s."""
    if t <= 1.0:
        raise ValueError("t must exceed 1")

    # with s = t/(1-v) the integrand collapses to the log-log slope
    def integrand(v):
        return _log_u_slope(model, t / (1.0 - v))

    return _quad01(integrand, f"gamma_alt(t={t!r}) for {model.spec_string()}")


def delta_curve(model: TailModel, t: float) -> float:
    """Gap between the two gamma representations at t."""
    return gamma_repr_eq(model, t) - gamma_repr_alt(model, t)


def davis_resnick_a(model: TailModel, t: float) -> float:
    """a*(t) = t * integral of (1 - F(e^s)) over s >= ln U(t)."""
    if t <= 1.0:
        raise ValueError("t must exceed 1")
    log_u = math.log(u_function(model, t))

    def integrand(v):
        s = log_u + v / (1.0 - v)
        if s > 700.0:
            # exp overflows past ~709 and the tail is zero there anyway
            return 0.0
        return tail(model, math.exp(s)) / (1.0 - v) ** 2

    return t * _quad01(integrand, f"a_star(t={t!r}) for {model.spec_string()}")


@dataclass(frozen=True)
class SecondOrderCurve:
    t: np.ndarray
    j: np.ndarray
    gamma_eq: np.ndarray
    gamma_alt: np.ndarray
    delta: np.ndarray
    a_star: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.t)
        for name in ("j", "gamma_eq", "gamma_alt", "delta", "a_star"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length does not match t")

    def to_plot_series(self) -> PlotSeries:
        curves = {
            "j": self.j,
            "gamma_eq": self.gamma_eq,
            "gamma_alt": self.gamma_alt,
            "delta": self.delta,
            "a_star": self.a_star,
        }
        return PlotSeries(x=np.asarray(self.t, dtype=float), curves=curves, meta=dict(self.meta))


def second_order_curve(model: TailModel, t_list) -> SecondOrderCurve:
    """All the second-order diagnostics along a t grid."""
    ts = np.array([float(t) for t in t_list])
    if ts.size == 0 or np.any(ts <= 1.0):
        raise ValueError("t grid must be non-empty with every t > 1")
    j = np.array([second_order_j(model, t) for t in ts])
    eq = np.array([gamma_repr_eq(model, t) for t in ts])
    alt = np.array([gamma_repr_alt(model, t) for t in ts])
    a = np.array([davis_resnick_a(model, t) for t in ts])
    meta = {"kind": "second_order", "model": model.spec_string()}
    return SecondOrderCurve(
        t=ts, j=j, gamma_eq=eq, gamma_alt=alt, delta=eq - alt, a_star=a, meta=meta
    )
