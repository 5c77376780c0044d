"""Command-line front end.

Scalars are printed as JSON, plot series as CSV (or JSON with
--format json). Exit codes: 0 ok, 2 argument errors, 3 data errors,
4 quadrature failures.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from .asymptotics import (
    berry_esseen_superiority_interval,
    optimal_p_berry_esseen,
    with_asymptotics,
)
from .diagnostics import (
    BootstrapConfig,
    QuadratureError,
    bootstrap_band,
    fixed_k_series,
    hill_plot_series,
    second_order_curve,
)
from .distributions import TailModel, sample as draw_sample
from .estimators import (
    DataFormatError,
    Sample,
    generalized_hill,
    load_values,
    mean_excess,
    mean_excess_series,
    pot_tail_probability,
    snow_sample,
)
from .series import PlotSeries, plot_series_csv

DEFAULT_P_GRID = (0.0, -0.1, -1.0)
DEFAULT_T_LADDER = (2.0, 10.0, 100.0, 1000.0, 10000.0)


def _emit(text: str, path: str | None) -> None:
    # series and reports land in files atomically: temp file in the
    # target directory, then rename
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tailindex-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _emit_json(payload: dict, path: str | None) -> None:
    _emit(json.dumps(payload, indent=2, allow_nan=False) + "\n", path)


def _cell_list(vec):
    return [None if math.isnan(float(v)) else float(v) for v in vec]


def _series_payload(series: PlotSeries, command: str) -> dict:
    band = None
    if series.band is not None:
        band = {"lo": _cell_list(series.band[0]), "hi": _cell_list(series.band[1])}
    return {
        "command": command,
        "x": [float(v) for v in series.x],
        "curves": {name: _cell_list(vec) for name, vec in series.curves.items()},
        "band": band,
        "meta": {str(k): str(v) for k, v in series.meta.items()},
    }


def _emit_series(series: PlotSeries, args) -> int:
    if args.format == "json":
        _emit_json(_series_payload(series, args.command), args.output)
    else:
        _emit(plot_series_csv(series), args.output)
    return 0


def _load_observations(args):
    """Resolve the --input/--model source to (Sample, description)."""
    if args.input is not None:
        values = load_values(args.input, args.column)
        return Sample(values), args.input
    model = TailModel.from_spec(args.model)
    if args.n is None:
        raise ValueError("--n is required when the source is --model")
    values = draw_sample(model, args.n, args.seed)
    return Sample(values), model.spec_string()


def _ci_payload(ci, level: float):
    if ci is None:
        return None
    return {"lower": ci[0], "upper": ci[1], "level": level}


def cmd_estimate(args) -> int:
    obs, source = _load_observations(args)
    result = generalized_hill(obs, args.k, args.p)
    filled, notes = with_asymptotics(result, args.level)
    payload = {
        "command": "estimate",
        "source": source,
        "n": filled.n,
        "k": args.k,
        "p": args.p,
        "gamma_hat": filled.gamma_hat,
        "std_err": filled.std_err,
        "ci": _ci_payload(filled.ci, args.level),
    }
    if args.p != 0.0:
        payload["h"] = filled.h_value
    if notes:
        payload["notes"] = notes
    _emit_json(payload, args.output)
    return 0


def cmd_hillplot(args) -> int:
    obs, _ = _load_observations(args)
    return _emit_series(hill_plot_series(obs, args.p, args.level), args)


def cmd_fixedk(args) -> int:
    obs, _ = _load_observations(args)
    p_list = args.p if args.p else list(DEFAULT_P_GRID)
    return _emit_series(fixed_k_series(obs, args.k, p_list), args)


def cmd_meplot(args) -> int:
    obs, _ = _load_observations(args)
    return _emit_series(mean_excess_series(obs), args)


def cmd_bootstrap(args) -> int:
    obs, source = _load_observations(args)
    config = BootstrapConfig(
        replicates=args.replicates,
        subsample_fraction=args.fraction,
        exceedance_target=args.exceedances,
        k=args.k,
        seed=args.seed,
    )
    report = bootstrap_band(obs, source, config, args.p)
    return _emit_series(report.series, args)


def cmd_diag2nd(args) -> int:
    model = TailModel.from_spec(args.model)
    t_list = args.t if args.t else list(DEFAULT_T_LADDER)
    curve = second_order_curve(model, t_list)
    return _emit_series(curve.to_plot_series(), args)


def cmd_optp(args) -> int:
    p_opt = optimal_p_berry_esseen(args.gamma)
    x_low, x_high = berry_esseen_superiority_interval()
    payload = {
        "command": "optp",
        "gamma": args.gamma,
        "p_opt": p_opt,
        "interval": [x_low / args.gamma, x_high / args.gamma],
    }
    _emit_json(payload, args.output)
    return 0


def cmd_simulate(args) -> int:
    model = TailModel.from_spec(args.model)
    values = draw_sample(model, args.n, args.seed)
    text = "\n".join(repr(float(v)) for v in values) + "\n"
    _emit(text, args.output)
    return 0


def cmd_snow_demo(args) -> int:
    snow = snow_sample()
    threshold = 1.65
    n_u, _ = mean_excess(snow, threshold)
    k = 17
    hill = generalized_hill(snow, k, 0.0)
    filled, _ = with_asymptotics(hill, args.level)
    gh = generalized_hill(snow, k, -0.1)
    pot_level = 2.5
    payload = {
        "command": "snow-demo",
        "n": snow.n,
        "threshold": threshold,
        "n_exceedances": n_u,
        "k": k,
        "hill_gamma": hill.gamma_hat,
        "generalized_p": -0.1,
        "generalized_gamma": gh.gamma_hat,
        "std_err": filled.std_err,
        "ci": _ci_payload(filled.ci, args.level),
        "pot_level": pot_level,
        "pot_probability": pot_tail_probability(
            snow.n, n_u, threshold, hill.gamma_hat, pot_level
        ),
    }
    _emit_json(payload, args.output)
    return 0


def _add_source_flags(sp) -> None:
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", help="data file, one value per line or CSV")
    group.add_argument("--model", help="model spec, e.g. pareto:alpha=2")
    sp.add_argument("--column", help="CSV column name for --input")
    sp.add_argument("--n", type=int, help="sample size drawn from --model")
    sp.add_argument(
        "--seed", type=int, default=0, help="RNG seed (default: %(default)s)"
    )


def _add_output_flags(sp, formats=("csv", "json"), default="csv") -> None:
    sp.add_argument("--output", help="output path (default: standard output)")
    sp.add_argument(
        "--format",
        choices=formats,
        default=default,
        help="output rendering (default: %(default)s)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailindex",
        description="Heavy-tail index estimation and diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("estimate", help="point estimate with asymptotics")
    _add_source_flags(sp)
    sp.add_argument("--k", type=int, required=True, help="order statistics used")
    sp.add_argument(
        "--p", type=float, default=0.0, help="power parameter (default: %(default)s)"
    )
    sp.add_argument(
        "--level",
        type=float,
        default=0.95,
        help="confidence level (default: %(default)s)",
    )
    _add_output_flags(sp, formats=("json",), default="json")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("hillplot", help="estimator curves over k with a band")
    _add_source_flags(sp)
    sp.add_argument(
        "--p",
        type=float,
        default=-0.1,
        help="power for the second curve (default: %(default)s)",
    )
    sp.add_argument(
        "--level",
        type=float,
        default=0.95,
        help="band confidence level (default: %(default)s)",
    )
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_hillplot)

    sp = sub.add_parser("fixedk", help="fixed-k curves while n grows")
    _add_source_flags(sp)
    sp.add_argument("--k", type=int, required=True, help="order statistics used")
    sp.add_argument(
        "--p",
        type=float,
        action="append",
        help="power, repeatable (default: 0, -0.1, -1)",
    )
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_fixedk)

    sp = sub.add_parser("meplot", help="mean excess over observed levels")
    _add_source_flags(sp)
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_meplot)

    sp = sub.add_parser("bootstrap", help="subsample band for the fixed-k curve")
    _add_source_flags(sp)
    sp.add_argument("--k", type=int, required=True, help="order statistics used")
    sp.add_argument(
        "--p", type=float, default=0.0, help="power parameter (default: %(default)s)"
    )
    sp.add_argument(
        "--replicates",
        type=int,
        default=200,
        help="subsample count (default: %(default)s)",
    )
    sp.add_argument(
        "--fraction",
        type=float,
        default=0.9,
        help="subsample fraction (default: %(default)s)",
    )
    sp.add_argument(
        "--exceedances", type=int, required=True, help="exceedances kept per subsample"
    )
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_bootstrap)

    sp = sub.add_parser("diag2nd", help="second-order diagnostic curves")
    sp.add_argument("--model", required=True, help="model spec, e.g. pareto:alpha=2")
    sp.add_argument(
        "--t",
        type=float,
        action="append",
        help="evaluation point t > 1, repeatable (default: 2, 10, 100, 1000, 10000)",
    )
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_diag2nd)

    sp = sub.add_parser("optp", help="Berry-Esseen-optimal power")
    sp.add_argument("--gamma", type=float, required=True, help="tail index gamma")
    _add_output_flags(sp, formats=("json",), default="json")
    sp.set_defaults(func=cmd_optp)

    sp = sub.add_parser("simulate", help="draw a sample from a model")
    sp.add_argument("--model", required=True, help="model spec, e.g. pareto:alpha=2")
    sp.add_argument("--n", type=int, required=True, help="sample size")
    sp.add_argument(
        "--seed", type=int, default=0, help="RNG seed (default: %(default)s)"
    )
    sp.add_argument("--output", help="output path (default: standard output)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("snow-demo", help="embedded snow dataset walk-through")
    sp.add_argument(
        "--level",
        type=float,
        default=0.95,
        help="confidence level (default: %(default)s)",
    )
    _add_output_flags(sp, formats=("json",), default="json")
    sp.set_defaults(func=cmd_snow_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except DataFormatError as exc:
        print(f"tailindex: {exc}", file=sys.stderr)
        return 3
    except QuadratureError as exc:
        print(f"tailindex: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"tailindex: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"tailindex: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
