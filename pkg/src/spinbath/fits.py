"""Decay-law analysis of the coherence rho_23(t)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class Envelope:
    t: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.value, dtype=float)
        if t.shape != v.shape:
            raise ValueError("times and values differ in length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("envelope times must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "value", v)

    def __len__(self):
        return self.t.size


@dataclass(frozen=True)
class FitResult:
    model: str
    params: dict
    rms: float
    window: tuple
    n_points: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.params["rate"]


def two_step_prediction(t, N: int, delta: float, J: float):
    """Two-step law for Re rho_23 with a non-interacting large bath.

    [1/6 + (1 - b t^2)/3 exp(-c t^2)] cos(w t),  b = N delta^2/4, c = b/2, w = J - delta.
    """
    t = np.asarray(t, dtype=float)
    b, c, w = two_step_parameters(N, delta, J)
    return (1 / 6 + (1 - b * t**2) / 3 * np.exp(-c * t**2)) * np.cos(w * t)


def two_step_parameters(N: int, delta: float, J: float) -> tuple[float, float, float]:
    b = N * delta**2 / 4
    return b, b / 2, J - delta


def two_step_envelope(t, N: int, delta: float):
    t = np.asarray(t, dtype=float)
    b, c, _ = two_step_parameters(N, delta, 0.0)
    return np.abs(1 / 6 + (1 - b * t**2) / 3 * np.exp(-c * t**2))


def _column(series, name):
    if isinstance(series, dict):
        return np.asarray(series[name], dtype=float)
    return np.array([getattr(r, name) if not isinstance(r, dict) else r[name] for r in series], dtype=float)


def local_maxima(t, y) -> Envelope:
    """Strict local maxima of ``y``; a plateau of equal samples counts once, at its start."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        return Envelope(np.empty(0), np.empty(0))
    keep = []
    i = 1
    n = y.size
    while i < n - 1:
        if y[i] > y[i - 1]:
            j = i
            while j < n - 1 and y[j + 1] == y[i]:
                j += 1
            if j < n - 1 and y[j + 1] < y[i]:
                keep.append(i)
            i = j + 1
        else:
            i += 1
    keep = np.array(keep, dtype=int)
    sel = keep[y[keep] > 0] if keep.size else keep
    return Envelope(t[sel], y[sel])


def extract_envelope(series, field: str = "re_rho23_rectified", omega: float | None = None) -> Envelope:
    """Decay envelope of the coherence rho_23.

    ``re_rho23_rectified``: strict local maxima of |Re rho_23|, which carries
    the fast singlet-triplet oscillation.  If ``omega`` (its angular
    frequency) is given, the sampling must resolve the period with at least
    8 points.

    ``abs_rho23``: |rho_23| itself.  The modulus removes the oscillating
    phase, so every positive sample already lies on the envelope and coarse
    sampling is allowed.

    ``series`` is a list of records/rows or a dict of columns with ``t``,
    ``re_r23`` and ``abs_r23``.
    """
    t = _column(series, "t")
    if field == "abs_rho23":
        y = _column(series, "abs_r23")
        keep = y > 0
        return Envelope(t[keep], y[keep])
    if field != "re_rho23_rectified":
        raise ValueError(f"unknown envelope field {field!r}")
    y = np.abs(_column(series, "re_r23"))
    if omega and t.size > 1:
        dt = float(np.max(np.diff(t)))
        if dt > 2 * np.pi / abs(omega) / 8:
            raise FitError(
                f"series undersampled: dt={dt:g} but the period 2π/|ω| = {2 * np.pi / abs(omega):g} "
                "needs at least 8 samples"
            )
    return local_maxima(t, y)


def fit_exponential(env: Envelope, window: tuple[float, float] = (0.02, 0.45),
                    min_points: int = 5) -> FitResult:
    """Least-squares line through (t, log value) for values inside ``window``.

    rate = -slope, prefactor = exp(intercept); ``rms`` is the log-space residual.
    """
    lo, hi = window
    sel = (env.value >= lo) & (env.value <= hi)
    t = env.t[sel]
    y = np.log(env.value[sel])
    if t.size < min_points:
        raise FitError(f"only {t.size} envelope points inside window {window}, need {min_points}")
    A = np.column_stack([t, np.ones_like(t)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * t + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    return FitResult("exponential", {"rate": float(-slope), "prefactor": float(np.exp(intercept))},
                     rms, (float(lo), float(hi)), int(t.size),
                     {"t_first": float(t[0]), "t_last": float(t[-1])})


def fit_gaussian(env: Envelope, window: tuple[float, float] = (0.02, 0.45),
                 min_points: int = 5) -> FitResult:
    """Least-squares fit of log value = log a - g t^2 (Gaussian decay)."""
    lo, hi = window
    sel = (env.value >= lo) & (env.value <= hi)
    t = env.t[sel]
    y = np.log(env.value[sel])
    if t.size < min_points:
        raise FitError(f"only {t.size} envelope points inside window {window}, need {min_points}")
    A = np.column_stack([t**2, np.ones_like(t)])
    (g, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    rms = float(np.sqrt(np.mean((y - g * t**2 - intercept) ** 2)))
    return FitResult("gaussian", {"gauss_rate": float(-g), "prefactor": float(np.exp(intercept))},
                     rms, (float(lo), float(hi)), int(t.size))


def fit_rate_slope(points) -> float:
    """Zero-intercept least-squares slope of rate against omega."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise FitError("no points")
    w, a = pts[:, 0], pts[:, 1]
    if pts.shape[0] > 1 and np.unique(w).size < pts.shape[0]:
        raise FitError("omega values must be distinct")
    denom = float(np.dot(w, w))
    if denom == 0:
        raise FitError("all omega values are zero")
    return float(np.dot(w, a) / denom)


def slope_relative_residual(points) -> float:
    """RMS deviation from the zero-intercept line, relative to the RMS rate."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    s = fit_rate_slope(pts)
    r = pts[:, 1] - s * pts[:, 0]
    return float(np.sqrt(np.mean(r**2)) / np.sqrt(np.mean(pts[:, 1] ** 2)))


def compare_to_two_step(series, N: int, delta: float, J: float, t_window=(0.0, 30.0),
                   plateau_window=None) -> FitResult:
    """RMS deviation of Re rho_23 from the two-step law over ``t_window``.

    With ``plateau_window`` the mean of the |Re rho_23| envelope inside it is
    also reported (``extra["plateau"]``).
    """
    t = _column(series, "t")
    re = _column(series, "re_r23")
    sel = (t >= t_window[0]) & (t <= t_window[1])
    if not sel.any():
        raise FitError("no samples inside the comparison window")
    pred = two_step_prediction(t[sel], N, delta, J)
    rms = float(np.sqrt(np.mean((re[sel] - pred) ** 2)))
    b, c, w = two_step_parameters(N, delta, J)
    extra = {}
    if plateau_window is not None:
        env = local_maxima(t, np.abs(re))
        s = (env.t >= plateau_window[0]) & (env.t <= plateau_window[1])
        extra["plateau"] = float(np.mean(env.value[s])) if s.any() else float("nan")
        extra["plateau_points"] = int(s.sum())
    return FitResult("two-step", {"b": b, "c": c, "omega": w}, rms, tuple(t_window), int(sel.sum()), extra)
