"""Discrete principal-value Hilbert transform and the signal-level
fluctuation-dissipation check.

The time-domain fluctuation-dissipation relation ties the vacuum-field
signal to the dissipative source signal through

    g_vac(dt) = (2/pi) PV int d(dt') g_r_dprime(dt') / (dt - dt'),

i.e. g_vac is the Hilbert transform of 2*g_r_dprime.  verify_fdt_signal
checks this on a completed delay scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve


class GridError(ValueError):
    """Series not uniform or too coarse for the PV scheme."""


class WindowError(ValueError):
    """Scan window too narrow for a meaningful PV transform."""


def hilbert_transform(samples, step, tail_correction=False, grid=None):
    """PV convolution H[f](t_i) = (1/pi) PV int f(t')/(t_i - t') dt'.

    Midpoint-symmetric PV scheme on a uniform grid: the integral is taken
    with the midpoint rule on cells of width 2*step centered so that the
    singular point is a cell center; the singular cell drops out by
    symmetry.  Only samples at odd offsets from the evaluation point
    contribute, with weight 2/(pi*(i-j)).  The scheme reproduces analytic
    Hilbert pairs to spectral accuracy for band-limited input.

    With tail_correction=True an algebraic tail a/t' + b/t'^2 is fitted to
    the outer 10% of samples on each side and its PV integral beyond the
    window is added in closed form (requires a window straddling t=0,
    supplied via `grid`).

    Returns the transformed series; edge cells lack symmetric PV
    neighborhoods, so only interior values should be trusted.
    """
    f = np.asarray(samples, dtype=float)
    if f.ndim != 1:
        raise GridError("hilbert_transform expects a 1-D series")
    n = f.size
    if n < 64:
        raise GridError(f"series too coarse for PV transform: {n} < 64 points")
    if step <= 0:
        raise GridError("step must be positive")

    # Odd-offset convolution kernel k[m] = (2/pi)/m, m = i - j odd.
    m = np.arange(-(n - 1), n)
    kern = np.zeros(2 * n - 1)
    odd = (m % 2) != 0
    kern[odd] = (2.0 / math.pi) / m[odd]
    out = fftconvolve(f, kern, mode="valid")

    if tail_correction:
        if grid is None:
            raise GridError("tail_correction requires the sample grid")
        t = np.asarray(grid, dtype=float)
        if t.shape != f.shape:
            raise GridError("grid and samples must have equal length")
        out = out + _tail_contribution(t, f)
    return out


def _fit_algebraic_tail(t, f):
    """Least-squares fit of f ~ a/t + b/t^2 on the given samples."""
    basis = np.column_stack([1.0 / t, 1.0 / t**2])
    coef, *_ = np.linalg.lstsq(basis, f, rcond=None)
    return coef[0], coef[1]


def _phi1(x):
    """ln(1-x)/x, stable near x=0 (limit -1)."""
    small = np.abs(x) < 1e-6
    safe = np.where(small, 0.5, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.log1p(-safe) / safe
    return np.where(small, -1.0 - 0.5 * x - x * x / 3.0, val)


def _phi2(x):
    """(ln(1-x)+x)/x^2, stable near x=0 (limit -1/2)."""
    small = np.abs(x) < 1e-4
    safe = np.where(small, 0.5, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (np.log1p(-safe) + safe) / safe**2
    return np.where(small, -0.5 - x / 3.0 - 0.25 * x * x, val)


def _tail_contribution(t, f):
    """PV integral of the fitted algebraic tails beyond [t_min, t_max].

    The closed forms are, with x = t_i/T and T the window edge,

        int_T^inf (a/t' + b/t'^2)/(t_i-t') dt'
            = a*phi1(x)/T + b*phi2(x)/T^2           (right edge, T = t_max)
        int_-inf^-T ...
            = -a*phi1(-x)/T - b*phi2(-x)/T^2        (left edge,  T = -t_min)
    """
    n = t.size
    n_fit = max(4, n // 10)
    t_max = t[-1]
    t_min = t[0]
    if not (t_max > 0.0 and t_min < 0.0):
        raise WindowError("tail correction needs a window straddling t=0")
    a_r, b_r = _fit_algebraic_tail(t[-n_fit:], f[-n_fit:])
    a_l, b_l = _fit_algebraic_tail(t[:n_fit], f[:n_fit])

    Tr = t_max
    Tl = -t_min
    # the correction is singular exactly at the window edges (the PV pole
    # meets the tail); clamp the two edge samples to the adjacent value
    xr = np.clip(t / Tr, -1.0 + 1e-9, 1.0 - 1e-9)
    xl = np.clip(t / Tl, -1.0 + 1e-9, 1.0 - 1e-9)
    right = a_r * _phi1(xr) / Tr + b_r * _phi2(xr) / Tr**2
    left = -a_l * _phi1(-xl) / Tl - b_l * _phi2(-xl) / Tl**2
    return (right + left) / math.pi


@dataclass
class FdtReport:
    """Outcome of the signal-level fluctuation-dissipation check."""

    delta_t: np.ndarray
    g_vac: np.ndarray
    g_r_dprime: np.ndarray
    hilbert_prediction: np.ndarray
    residual: np.ndarray
    interior: slice
    max_rel_residual: float
    l2_rel_residual: float
    edge_ratio: float
    tail_estimate: float
    metadata: dict = field(default_factory=dict)


def verify_fdt_series(delta_t, g_vac, g_r_dprime, interior_fraction=0.6,
                      tail_correction=True, edge_limit=0.05):
    """Check g_vac against the PV transform of 2*g_r_dprime.

    Residual norms are evaluated on the central `interior_fraction` of the
    window, where the PV scheme has symmetric neighborhoods.  Raises
    WindowError when |g_vac| at the window edges exceeds `edge_limit` of
    its peak.
    """
    t = np.asarray(delta_t, dtype=float)
    gv = np.asarray(g_vac, dtype=float)
    gr = np.asarray(g_r_dprime, dtype=float)
    if t.size != gv.size or t.size != gr.size:
        raise GridError("series lengths differ")
    steps = np.diff(t)
    if steps.size == 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-9):
        raise GridError("delta_t grid is not uniform")
    step = float(steps[0])

    peak = float(np.max(np.abs(gv)))
    if peak == 0.0:
        raise WindowError("g_vac vanishes identically; nothing to verify")
    edge_ratio = float(max(abs(gv[0]), abs(gv[-1])) / peak)
    if edge_ratio > edge_limit:
        raise WindowError(
            f"scan window too narrow: edge |g_vac| is {edge_ratio:.3f} of peak "
            f"(limit {edge_limit})"
        )

    pred = hilbert_transform(2.0 * gr, step, tail_correction=tail_correction,
                             grid=t if tail_correction else None)
    tail_est = 0.0
    if tail_correction:
        plain = hilbert_transform(2.0 * gr, step)
        tail_est = float(np.max(np.abs(pred - plain)))

    n = t.size
    margin = int(round(0.5 * (1.0 - interior_fraction) * n))
    interior = slice(margin, n - margin)
    res = pred - gv
    res_in = res[interior]
    gv_in = gv[interior]
    max_rel = float(np.max(np.abs(res_in)) / np.max(np.abs(gv_in)))
    l2_rel = float(np.linalg.norm(res_in) / np.linalg.norm(gv_in))
    return FdtReport(
        delta_t=t, g_vac=gv, g_r_dprime=gr, hilbert_prediction=pred,
        residual=res, interior=interior, max_rel_residual=max_rel,
        l2_rel_residual=l2_rel, edge_ratio=edge_ratio, tail_estimate=tail_est,
        metadata={
            "step_fs": step, "window_fs": (float(t[0]), float(t[-1])),
            "interior_fraction": interior_fraction,
            "tail_correction": bool(tail_correction),
        },
    )


def verify_fdt_signal(records, interior_fraction=0.6, tail_correction=True,
                      edge_limit=0.05):
    """Run the fluctuation-dissipation check on a completed delay scan.

    `records` is a list of SignalRecord-like objects carrying delta_t,
    g_vac and g_r_dprime; failed points are rejected.
    """
    ok = [r for r in records if getattr(r, "status", "ok") == "ok"]
    if len(ok) != len(records):
        raise GridError("scan contains failed points; cannot verify FDT")
    t = np.array([r.delta_t for r in ok])
    gv = np.array([r.g_vac for r in ok])
    gr = np.array([r.g_r_dprime for r in ok])
    return verify_fdt_series(t, gv, gr, interior_fraction=interior_fraction,
                             tail_correction=tail_correction,
                             edge_limit=edge_limit)
