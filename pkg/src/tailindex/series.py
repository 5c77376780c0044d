"""Plot-series carrier and its CSV emission.

Lives in its own module so both the estimator and diagnostic layers can
produce series without importing each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _as_readonly(vec) -> np.ndarray:
    arr = np.array(vec, dtype=float)
    if arr.ndim != 1:
        raise ValueError("series vectors must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PlotSeries:
    """A named family of curves over a shared x grid, plus optional band.

    Band entries may be NaN where a curve's precondition fails; NaN
    cells are emitted as empty CSV fields.
    """

    x: np.ndarray
    curves: dict
    band: tuple | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "x", _as_readonly(self.x))
        curves = {name: _as_readonly(vec) for name, vec in self.curves.items()}
        object.__setattr__(self, "curves", curves)
        n = self.x.size
        for name, vec in curves.items():
            if "," in name or "\n" in name:
                raise ValueError(f"curve name {name!r} would break the CSV header")
            if vec.size != n:
                raise ValueError(f"curve {name!r} length {vec.size} != x length {n}")
        if self.band is not None:
            lo, hi = (_as_readonly(v) for v in self.band)
            if lo.size != n or hi.size != n:
                raise ValueError("band length does not match x")
            both = np.isfinite(lo) & np.isfinite(hi)
            if np.any(lo[both] > hi[both]):
                raise ValueError("band lower exceeds band upper")
            object.__setattr__(self, "band", (lo, hi))
        for key, val in self.meta.items():
            if "\n" in str(key) or "\n" in str(val):
                raise ValueError("meta entries must be single-line")


def _cell(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return ""
    return repr(v)


def plot_series_csv(series: PlotSeries) -> str:
    """Render a PlotSeries as CSV text.

    Meta lines come first as '# key=value' comments, then a header row
    (x, curve names, band_lo/band_hi when present), then shortest
    round-trip decimal rows. Output is byte-identical for equal input.
    """
    lines = [f"# {key}={val}" for key, val in series.meta.items()]
    names = list(series.curves)
    header = ["x", *names]
    if series.band is not None:
        header += ["band_lo", "band_hi"]
    lines.append(",".join(header))
    for i in range(series.x.size):
        row = [_cell(series.x[i])]
        row += [_cell(series.curves[name][i]) for name in names]
        if series.band is not None:
            row += [_cell(series.band[0][i]), _cell(series.band[1][i])]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
