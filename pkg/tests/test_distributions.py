import math

import numpy as np
import pytest

from tailindex.distributions import (
    TailModel,
    _bisect_tail,
    b_function,
    quantile,
    sample,
    tail,
    u_function,
    validate_seed,
)
from tailindex.special_functions import ks_statistic

ALL_MODELS = [
    TailModel.pareto(1.0, 1.0),
    TailModel.pareto(2.0, 1.0),
    TailModel.pareto(0.5, 3.0),
    TailModel.hall_weiss(1.0, -1.0),
    TailModel.hall_weiss(2.0, -1.0),
    TailModel.hall_weiss(1.0, -2.0),
    TailModel.hall_weiss(1.5, -0.7),
    TailModel.hill_horror(0.5),
    TailModel.hill_horror(1.0),
    TailModel.hill_horror(2.0),
    TailModel.log_erlang21(),
    TailModel.slow_var_log(),
]


def test_tail_trivial_points():
    assert tail(TailModel.pareto(1.0, 1.0), 2.0) == 0.5
    assert tail(TailModel.hall_weiss(1.0, -1.0), 1.0) == 1.0
    assert abs(tail(TailModel.log_erlang21(), math.e) - 2.0 / math.e) < 1e-15
    assert abs(tail(TailModel.slow_var_log(), math.e) - 1.0) < 1e-15
    for m in ALL_MODELS:
        assert tail(m, m.x_min) == 1.0
        assert tail(m, m.x_min - 0.5) == 1.0


def test_tail_nonincreasing():
    for m in ALL_MODELS:
        start = max(m.x_min, 1e-3)
        xs = np.geomspace(start, start * 1e6, 80)
        vals = [tail(m, float(x)) for x in xs]
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:])), m.kind
        assert all(0.0 < v <= 1.0 for v in vals), m.kind


def test_quantile_trivial_points():
    assert abs(quantile(TailModel.pareto(1.0, 1.0), 0.5) - 2.0) < 1e-12
    hh = TailModel.hill_horror(1.0)
    assert abs(quantile(hh, 1.0 - 1.0 / math.e) - math.e) < 1e-12
    assert quantile(TailModel.hall_weiss(1.0, -1.0), 0.0) == 1.0
    assert quantile(hh, 0.0) == 0.0


def test_quantile_domain():
    m = TailModel.pareto(1.0, 1.0)
    for u in (1.0, 1.5, -0.01):
        with pytest.raises(ValueError):
            quantile(m, u)


def test_quantile_round_trip():
    # the cdf of the quantile must give back at least u, and not overshoot
    grid = np.concatenate([np.linspace(0.0, 0.999, 45), [0.9999]])
    for m in ALL_MODELS:
        for u in grid:
            q = quantile(m, float(u))
            f = 1.0 - tail(m, q)
            assert u <= f <= u + 1e-9, (m.kind, u, f)
        # near u = 0 the subtraction 1 - tail cannot resolve below
        # machine epsilon, so only an eps-level bound is meaningful
        u = 1e-12
        f = 1.0 - tail(m, quantile(m, u))
        assert abs(f - u) <= 1e-15 and f <= u + 1e-9, m.kind


def test_quantile_strictly_increasing():
    grid = np.linspace(0.0, 0.99, 34)
    for m in ALL_MODELS:
        qs = [quantile(m, float(u)) for u in grid]
        assert all(b > a for a, b in zip(qs, qs[1:])), m.kind


def test_b_function_trivial_points():
    assert abs(b_function(TailModel.pareto(2.0, 1.0), 16.0) - 4.0) < 1e-12
    assert abs(b_function(TailModel.hall_weiss(1.0, -1.0), 1.0) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        b_function(TailModel.pareto(1.0, 1.0), 0.5)


def test_b_consistency():
    for m in ALL_MODELS:
        for t in (2.0, 10.0, 1e3, 1e6):
            b = b_function(m, t)
            assert b >= m.x_min
            assert abs(1.0 / tail(m, b) - t) <= 1e-6 * t, (m.kind, t)


def test_b_closed_form_vs_bisection():
    closed = [
        TailModel.hall_weiss(1.0, -1.0),
        TailModel.hall_weiss(2.0, -1.0),
        TailModel.hall_weiss(1.0, -2.0),
        TailModel.log_erlang21(),
        TailModel.slow_var_log(),
    ]
    for m in closed:
        for t in (1.5, 2.0, 10.0, 100.0, 1e3, 1e6):
            ref = float(_bisect_tail(m, np.asarray(1.0 / t))[()])
            got = b_function(m, t)
            assert abs(got - ref) <= 1e-8 * ref, (m.kind, t, got, ref)


def test_b_log_erlang_at_100():
    # bisection oracle for the Lambert W closed form
    m = TailModel.log_erlang21()
    ref = float(_bisect_tail(m, np.asarray(0.01))[()])
    b = b_function(m, 100.0)
    assert abs(b - ref) <= 1e-8 * ref
    assert abs(1.0 / tail(m, b) - 100.0) <= 1e-9 * 100.0


def test_u_function_known_points():
    assert abs(u_function(TailModel.hill_horror(1.0), math.e) - math.e) < 1e-12
    assert abs(u_function(TailModel.hill_horror(2.0), math.e**2) - 2.0 * math.e) < 1e-12
    assert abs(u_function(TailModel.pareto(2.0, 1.0), 9.0) - 3.0) < 1e-12
    # beyond float resolution of 1 - 1/n the b route takes over
    assert abs(u_function(TailModel.pareto(2.0, 1.0), 1e16) - 1e8) < 1.0
    with pytest.raises(ValueError):
        u_function(TailModel.pareto(1.0, 1.0), 1.0)


def test_sample_deterministic():
    m = TailModel.pareto(1.0, 1.0)
    a = sample(m, 1000, 42)
    b = sample(m, 1000, 42)
    assert a.tobytes() == b.tobytes()
    c = sample(m, 1000, 43)
    assert not np.array_equal(a, c)


def test_sample_support():
    for m in ALL_MODELS:
        xs = sample(m, 2000, 7)
        assert np.all(xs >= m.x_min), m.kind


def test_sample_ks_pareto():
    m = TailModel.pareto(1.0, 1.0)
    xs = np.sort(sample(m, 10**5, 1234))
    d = ks_statistic(xs, lambda v: 1.0 - tail(m, v))
    assert d < 0.01


def test_sample_ks_bisection_models():
    for m, seed in [
        (TailModel.hall_weiss(1.0, -1.0), 5),
        (TailModel.log_erlang21(), 6),
        (TailModel.slow_var_log(), 8),
    ]:
        xs = np.sort(sample(m, 2 * 10**4, seed))
        d = ks_statistic(xs, lambda v: 1.0 - tail(m, v))
        assert d < 0.015, m.kind


def test_sample_ks_hill_horror():
    m = TailModel.hill_horror(0.5)
    xs = np.sort(sample(m, 2000, 9))
    d = ks_statistic(xs, lambda v: 1.0 - tail(m, v))
    assert d < 0.04


def test_seed_validation():
    assert validate_seed(0) == 0
    assert validate_seed(2**64 - 1) == 2**64 - 1
    assert validate_seed(np.uint64(5)) == 5
    for bad in (-1, 2**64, 1.5, "7", None):
        with pytest.raises(ValueError):
            validate_seed(bad)


def test_from_spec_round_trip():
    cases = [
        ("pareto:alpha=2,delta=1", "pareto", {"alpha": 2.0, "delta": 1.0}),
        ("hallweiss:alpha=1,rho=-1", "hallweiss", {"alpha": 1.0, "rho": -1.0}),
        ("hillhorror:alpha=0.5", "hillhorror", {"alpha": 0.5}),
        ("logerlang21", "logerlang21", {}),
        ("slowvarlog", "slowvarlog", {}),
    ]
    for text, kind, params in cases:
        m = TailModel.from_spec(text)
        assert m.kind == kind
        for key, val in params.items():
            assert getattr(m, key) == val
        again = TailModel.from_spec(m.spec_string())
        assert again == m


def test_from_spec_errors():
    bad = [
        "frechet:alpha=1",
        "pareto:alpha",
        "pareto:alpha=abc",
        "logerlang21:alpha=1",
        "hallweiss:alpha=1",
        "pareto:alpha=-2",
        "hallweiss:alpha=1,rho=0.5",
    ]
    for text in bad:
        with pytest.raises(ValueError):
            TailModel.from_spec(text)


def test_gamma_property():
    assert TailModel.pareto(4.0).gamma == 0.25
    assert TailModel.log_erlang21().gamma == 1.0
