"""Order-statistics machinery and the generalized Hill estimator family.

The estimator with power p acts on the top k ratios above the pivot
order statistic; p = 0 is the classical Hill limit. Asymptotic fields
(std_err, ci) stay empty here and are filled by the asymptotics layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import PlotSeries


class DataFormatError(ValueError):
    """Bad input data file (distinct from argument errors for exit codes)."""

# Bundled example data: 41 annual maxima of the ratio of snow load to
# the characteristic snow load.
SNOW_DATA = (
    2.03, 2.0, 2.0, 1.96, 1.83, 1.83, 1.80, 1.78, 1.75, 1.75, 1.75, 1.75,
    1.73, 1.71, 1.71, 1.67, 1.67, 1.66, 1.65, 1.65, 1.65, 1.65, 1.64,
    1.63, 1.61, 1.6, 1.60, 1.60, 1.59, 1.58, 1.56, 1.56, 1.55, 1.53,
    1.53, 1.51, 1.5, 1.49, 1.49, 1.49, 1.49,
)


class Sample:
    """Immutable positive observations with cached ascending order stats."""

    def __init__(self, values):
        arr = np.array(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("Sample needs a nonempty one-dimensional vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Sample values must be finite")
        if np.any(arr <= 0.0):
            raise ValueError("Sample values must be strictly positive")
        arr.setflags(write=False)
        self._values = arr
        srt = np.sort(arr)
        srt.setflags(write=False)
        self._sorted = srt

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def sorted(self) -> np.ndarray:
        return self._sorted

    @property
    def n(self) -> int:
        return int(self._values.size)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Sample(n={self.n})"


def snow_sample() -> Sample:
    return Sample(SNOW_DATA)


@dataclass(frozen=True)
class EstimatorSpec:
    k: int
    p: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")


@dataclass(frozen=True)
class EstimateResult:
    gamma_hat: float
    h_value: float | None
    spec: EstimatorSpec
    n: int
    std_err: float | None = None
    ci: tuple | None = None


def _top_ratios(sample: Sample, k: int) -> np.ndarray:
    n = sample.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= n-1, got k={k}, n={n}")
    srt = sample.sorted
    pivot = srt[n - k - 1]
    if pivot <= 0.0:
        raise ValueError("pivot order statistic must be positive")
    return srt[n - k :] / pivot


def h_statistic(sample: Sample, k: int, p: float) -> float:
    """Power-p mean of the top-k order statistic ratios."""
    if p == 0.0:
        raise ValueError("h_statistic needs p != 0; p = 0 is the Hill limit")
    ratios = _top_ratios(sample, k)
    return float(np.mean(ratios**p))


def generalized_hill(sample: Sample, k: int, p: float) -> EstimateResult:
    """Tail-index estimate from the top k ratios with power p."""
    if p == 0.0:
        ratios = _top_ratios(sample, k)
        gamma = float(np.mean(np.log(ratios)))
        h = None
    else:
        h = h_statistic(sample, k, p)
        gamma = (1.0 - 1.0 / h) / p
    return EstimateResult(
        gamma_hat=max(gamma, 0.0),
        h_value=h,
        spec=EstimatorSpec(k=k, p=float(p)),
        n=sample.n,
    )


def mean_excess(sample: Sample, u: float):
    """(N_u, mean of X - u over the N_u observations above u)."""
    exceed = sample.values[sample.values > u]
    if exceed.size == 0:
        raise ValueError(f"no observations exceed u={u!r}")
    return int(exceed.size), float(exceed.mean() - u)


def mean_excess_series(sample: Sample) -> PlotSeries:
    """Mean excess at every distinct observed level except the top one."""
    if sample.n < 3:
        raise ValueError("mean_excess_series needs at least 3 observations")
    srt = sample.sorted
    distinct = np.unique(srt)
    if distinct.size < 2:
        raise ValueError("all observations are equal, no excess levels exist")
    grid = distinct[:-1]
    # suffix sums give every level's exceedance mean in one pass
    suffix = np.concatenate([np.cumsum(srt[::-1])[::-1], [0.0]])
    right = np.searchsorted(srt, grid, side="right")
    counts = sample.n - right
    vals = suffix[right] / counts - grid
    return PlotSeries(
        x=grid,
        curves={"mean_excess": vals},
        meta={"series": "mean_excess", "n": str(sample.n)},
    )


def threshold_for_exceedances(sample: Sample, m: int) -> float:
    """Largest observed level with at least m strictly greater values.

    m = n is degenerate: the minimum is returned and the exceedance
    count is then taken by the at-least rule.
    """
    n = sample.n
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    srt = sample.sorted
    if m == n:
        return float(srt[0])
    distinct = np.unique(srt)
    counts = n - np.searchsorted(srt, distinct, side="right")
    ok = distinct[counts >= m]
    if ok.size == 0:
        return float(srt[0])
    return float(ok[-1])


def pot_tail_probability(n: int, n_u: int, u: float, gamma_hat: float, x: float) -> float:
    """Peaks-over-threshold tail estimate (x/u)^(-1/gamma) * N_u/n."""
    if u <= 0.0 or x < u:
        raise ValueError("need x >= u > 0")
    if gamma_hat <= 0.0:
        raise ValueError("gamma_hat must be positive")
    if not 0 <= n_u <= n or n < 1:
        raise ValueError("need 0 <= n_u <= n with n >= 1")
    return (x / u) ** (-1.0 / gamma_hat) * (n_u / n)


def load_values(path: str, column: str | None = None) -> np.ndarray:
    """Read observations from a text file.

    Plain mode: one decimal number per line (blank lines skipped).
    CSV mode (column given): header row names the column to read.
    Raises DataFormatError with a line number on bad content.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if column is not None:
        return _parse_csv_column(lines, column, path)
    vals = []
    for i, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            vals.append(float(text))
        except ValueError:
            raise DataFormatError(f"{path}:{i}: not a number: {text!r}") from None
    if not vals:
        raise DataFormatError(f"{path}: no data rows")
    return np.asarray(vals)


def _parse_csv_column(lines, column, path):
    rows = [line for line in lines if line.strip()]
    if not rows:
        raise DataFormatError(f"{path}: empty file")
    header = [cell.strip() for cell in rows[0].split(",")]
    if column not in header:
        raise DataFormatError(f"{path}:1: no column {column!r} in header {header}")
    idx = header.index(column)
    vals = []
    for i, line in enumerate(rows[1:], start=2):
        cells = line.split(",")
        if idx >= len(cells):
            raise DataFormatError(f"{path}:{i}: row has no column {column!r}")
        text = cells[idx].strip()
        try:
            vals.append(float(text))
        except ValueError:
            raise DataFormatError(f"{path}:{i}: not a number: {text!r}") from None
    if not vals:
        raise DataFormatError(f"{path}: no data rows")
    return np.asarray(vals)
