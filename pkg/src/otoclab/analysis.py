"""Time-series analytics: exponential-window detection, growth-rate fitting,
saturation/Ehrenfest estimates, and the chaos-bound check.

All decision constants live here so verdicts are reproducible: a fit is valid
only on windows of at least MIN_WINDOW_POINTS samples with log-space rms
residual below RESIDUAL_CAP; plateaus come from the trailing 20% of a series;
bound checks carry a caveat whenever the growth window spans less than one
decade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .hilbert import maximally_mixed
from .models import KickedRotorSpec, build_kicked_rotor
from .scrambling import TimeGrid, TimeSeries, squared_commutator

MIN_WINDOW_POINTS = 8
RESIDUAL_CAP = 0.1          # rms in log space
PLATEAU_BAND = 0.05         # relative band around the plateau
DECADE_SPAN = 1.0           # minimum decades for an uncaveated bound check
PLATEAU_FRACTION = 0.2      # trailing fraction of the grid used as plateau


@dataclass(frozen=True)
class Window:
    t_start: float
    t_end: float

    @property
    def is_empty(self) -> bool:
        return not (self.t_start < self.t_end)

    @classmethod
    def empty(cls) -> "Window":
        return cls(math.nan, math.nan)


@dataclass(frozen=True)
class GrowthFit:
    rate: float
    intercept: float
    window: Window
    residual: float
    valid: bool
    n_points: int

    @property
    def decades(self) -> float:
        """Decades of value growth spanned by the fitted window."""
        return abs(self.rate) * (self.window.t_end - self.window.t_start) / math.log(10.0)


@dataclass(frozen=True)
class SaturationEstimate:
    t_sat: float
    plateau: float
    method: str


@dataclass(frozen=True)
class MSSVerdict:
    passed: bool
    ratio: float
    bound: float
    rate: float
    caveat: bool


def _plateau(values: np.ndarray) -> float:
    tail = max(1, int(math.ceil(PLATEAU_FRACTION * values.size)))
    return float(values[-tail:].mean())


def _longest_true_run(mask: np.ndarray) -> Optional[tuple[int, int]]:
    best = None
    start = None
    for k, flag in enumerate(mask):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            if best is None or (k - 1 - start) > (best[1] - best[0]):
                best = (start, k - 1)
            start = None
    if start is not None:
        if best is None or (mask.size - 1 - start) > (best[1] - best[0]):
            best = (start, mask.size - 1)
    return best


def detect_growth_window(series: TimeSeries, floor: float,
                         ceiling_fraction: float) -> Window:
    """Maximal contiguous stretch with floor < value < ceiling_fraction * plateau."""
    if not 0 < ceiling_fraction < 1:
        raise ValueError("ceiling_fraction must lie in (0, 1)")
    values = series.real_values()
    if values.min() < 0:
        raise ValueError(f"series has negative values (min {values.min():.3e}); "
                         "growth detection expects a nonnegative series")
    ceiling = ceiling_fraction * _plateau(values)
    run = _longest_true_run((values > floor) & (values < ceiling))
    if run is None:
        return Window.empty()
    return Window(float(series.times[run[0]]), float(series.times[run[1]]))


def fit_lyapunov(series: TimeSeries, window: Window) -> GrowthFit:
    """Least-squares line through (t, ln value) on the window."""
    if window is None or window.is_empty:
        raise ValueError("fit window is empty")
    values = series.real_values()
    sel = (series.times >= window.t_start) & (series.times <= window.t_end)
    n = int(sel.sum())
    if n < 2:
        raise ValueError(f"window contains {n} samples; need at least 2 to fit")
    if values[sel].min() <= 0:
        raise ValueError("nonpositive values inside the fit window")
    ts = series.times[sel]
    logs = np.log(values[sel])
    slope, intercept = np.polyfit(ts, logs, 1)
    residual = float(np.sqrt(np.mean((logs - (slope * ts + intercept)) ** 2)))
    valid = n >= MIN_WINDOW_POINTS and residual <= RESIDUAL_CAP
    return GrowthFit(rate=float(slope), intercept=float(intercept),
                     window=window, residual=residual, valid=valid, n_points=n)


def estimate_saturation(series: TimeSeries) -> SaturationEstimate:
    """Plateau from the trailing 20%; t_sat where the series enters and stays
    within PLATEAU_BAND of it, linearly interpolated between samples."""
    values = series.real_values()
    times = series.times
    plateau = _plateau(values)
    band = PLATEAU_BAND * abs(plateau)
    dist = np.abs(values - plateau) - band
    inside = dist <= 0
    if not inside[-1]:
        return SaturationEstimate(t_sat=float(times[-1]), plateau=plateau,
                                  method="unsaturated")
    outside = np.where(~inside)[0]
    if outside.size == 0:
        return SaturationEstimate(t_sat=float(times[0]), plateau=plateau,
                                  method="band-entry")
    k = int(outside[-1])  # last sample outside; the series stays in band after it
    d0, d1 = dist[k], dist[k + 1]
    frac = d0 / (d0 - d1) if d0 != d1 else 1.0
    t_sat = float(times[k] + (times[k + 1] - times[k]) * frac)
    return SaturationEstimate(t_sat=t_sat, plateau=plateau, method="band-entry")


def convergence_window(series_a: TimeSeries, series_b: TimeSeries, floor: float,
                       rel_tol: float = 0.01) -> Window:
    """Window where two truncations of the same quantity agree within rel_tol
    (relative to series_b, the better-converged run) and sit above floor."""
    if not np.array_equal(series_a.times, series_b.times):
        raise ValueError("convergence_window needs series on the same grid")
    a = series_a.real_values()
    b = series_b.real_values()
    rel = np.abs(a - b) / np.maximum(np.abs(b), 1e-300)
    run = _longest_true_run((rel < rel_tol) & (b > floor))
    if run is None:
        return Window.empty()
    return Window(float(series_a.times[run[0]]), float(series_a.times[run[1]]))


@dataclass(frozen=True)
class EhrenfestScaling:
    points: tuple[tuple[float, float], ...]   # (hbar_eff, t_sat)
    slope: float                              # d t_sat / d ln(1/hbar_eff)
    applicable: bool
    fits: tuple[Optional[GrowthFit], ...]
    series: tuple[TimeSeries, ...]


def ehrenfest_scaling(base_spec: KickedRotorSpec, hbar_list: Sequence[float],
                      n_kicks: int = 30, operator_label: str = "sin",
                      window_floor_fraction: float = 0.01,
                      window_ceiling_fraction: float = 0.5,
                      threads: int = 1) -> EhrenfestScaling:
    """Saturation time of the kicked-rotor commutator growth per hbar_eff,
    plus the slope of t_sat against ln(1/hbar_eff)."""
    hbars = [float(h) for h in hbar_list]
    if len(hbars) < 3:
        raise ValueError("need at least 3 hbar_eff values")
    if len(set(hbars)) != len(hbars):
        raise ValueError("hbar_eff values must be distinct")
    grid = TimeGrid.kicks(n_kicks)
    points, fits, all_series = [], [], []
    for hbar in hbars:
        spec = replace(base_spec, effective_planck=hbar)
        model = build_kicked_rotor(spec)
        op = model.local_op(0, operator_label)
        state = maximally_mixed(model.space)
        series = squared_commutator(model, op, op, state, grid, threads=threads)
        sat = estimate_saturation(series)
        points.append((hbar, sat.t_sat))
        window = detect_growth_window(series, floor=window_floor_fraction * sat.plateau,
                                      ceiling_fraction=window_ceiling_fraction)
        if window.is_empty:
            fits.append(None)
        else:
            try:
                fits.append(fit_lyapunov(series, window))
            except ValueError:
                fits.append(None)
        all_series.append(series)
    applicable = all(f is not None and f.valid and f.rate > 0 for f in fits)
    slope = float(np.polyfit(np.log(1.0 / np.array(hbars)),
                             [t for _, t in points], 1)[0])
    return EhrenfestScaling(points=tuple(points), slope=slope, applicable=applicable,
                            fits=tuple(fits), series=tuple(all_series))


def mss_check(fit: GrowthFit, temperature: float) -> MSSVerdict:
    """Compare a fitted growth rate against the thermal bound 2 pi T (hbar=k_B=1).

    The verdict is advisory: a caveat flag is set whenever the fitted window
    spans less than DECADE_SPAN decades, since short windows lack the
    timescale separation the bound presumes.
    """
    if not fit.valid:
        raise ValueError("mss_check requires a valid growth fit")
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    bound = 2.0 * math.pi * temperature
    ratio = fit.rate / bound
    return MSSVerdict(passed=fit.rate <= bound, ratio=ratio, bound=bound,
                      rate=fit.rate, caveat=fit.decades < DECADE_SPAN)
