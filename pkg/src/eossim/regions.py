"""Light-cone classification of pulse-pair geometries.

A geometry is region I when every pair of points drawn from the two
pulses' space-time supports is space-like separated at the in-medium
speed c_n = c/n, region III when every pair is time-like, and region II
when causal contact is possible.  The classifier reduces the extrema of
s = c_n*|t - t'| - |r - r'| over the support product to a handful of
closed-form candidates (the supports are boxes in the co-moving
coordinates and the group index exceeds the phase index, so no interior
critical points exist), making it exact for rectangular pulses and exact
up to the 1% support truncation for Gaussian ones.

The analytic boundary curves valid for delta_r >> w are

    delta_r_I_II   =  w + sqrt((c_n*(dt + tau_p) + L*n_g/n)^2 - L^2)
    delta_r_II_III = -w + sqrt((c_n*(dt - tau_p) - L*n_g/n)^2 - L^2)

where the second requires the future branch c_n*(dt - tau_p) >= L*n_g/n + L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import medium as medium_mod
from . import units

# Gaussian supports are truncated where the envelope falls to this
# fraction of its peak, factor by factor.
SUPPORT_THRESHOLD = 0.01


class BoundaryDomainError(ValueError):
    """Analytic boundary formula evaluated outside its validity domain."""


@dataclass(frozen=True)
class RegionLabel:
    """Classification of one geometry.

    margin is the signed distance (um) to the nearest label flip in the
    s-functional: how far s_max is below zero (I), s_min above zero
    (III), or the smaller of the two exceedances (II).
    """

    label: str
    margin: float


@dataclass(frozen=True)
class GeometryParams:
    """Scalar parameters entering the boundary formulas."""

    waist: float
    duration: float
    crystal_length: float
    n: float
    n_g: float

    @property
    def c_n(self):
        return units.C_UM_FS / self.n

    @property
    def retard(self):
        """L * n_g / n, the group-retarded longitudinal term (um)."""
        return self.crystal_length * self.n_g / self.n


def _gauss_halfwidth(fwhm, threshold):
    """Half-width where exp(-4 ln2 u^2 / fwhm^2) falls to `threshold`."""
    return fwhm * math.sqrt(math.log(1.0 / threshold) / (4.0 * math.log(2.0)))


def support_halfwidths(pulse, threshold=SUPPORT_THRESHOLD):
    """(transverse, temporal) support half-widths of one pulse."""
    if pulse.shape == "rect":
        return 0.5 * pulse.waist, 0.5 * pulse.duration
    return (_gauss_halfwidth(pulse.waist, threshold),
            _gauss_halfwidth(pulse.duration, threshold))


def _s_extrema(dx, dy, dt, half_x, half_t, L, c_n, beta):
    """Extrema of s = c_n|tau| - |rho| over the support product.

    Works on numpy arrays of dx/dt (grids classify in one shot).
    half_x/half_t are the summed transverse/temporal half-widths of the
    two pulses; rho_z spans [-L, L]; tau = dt + beta*rho_z + g with
    |g| <= half_t.
    """
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    dt = np.asarray(dt, dtype=float)
    r_min2 = np.maximum(np.abs(dx) - half_x, 0.0) ** 2 \
        + np.maximum(np.abs(dy) - half_x, 0.0) ** 2
    r_max2 = (np.abs(dx) + half_x) ** 2 + (np.abs(dy) + half_x) ** 2

    # s_max: max_g |tau| = |dt + beta*rho_z| + half_t, min over transverse;
    # both tau branches move outward faster than |rho| grows (n_g/n > 1 or
    # not, the 1-D profiles in rho_z are piecewise monotone), so the
    # maximum sits at rho_z = +-L or at the |tau| kink rho_z = -dt/beta.
    def s_upper(rho_z):
        return c_n * (np.abs(dt + beta * rho_z) + half_t) \
            - np.sqrt(r_min2 + rho_z**2)

    cand = [s_upper(np.full_like(dt, -L)), s_upper(np.full_like(dt, L))]
    kink = np.clip(-dt / beta, -L, L)
    cand.append(s_upper(kink))
    s_max = np.maximum.reduce(cand)

    # s_min: min_g c_n * dist(0, tau-interval) - max |rho|; candidates are
    # the endpoints and the boundaries of the tau-interval-straddles-zero
    # branch.
    def s_lower(rho_z):
        tau_den = np.maximum(np.abs(dt + beta * rho_z) - half_t, 0.0)
        return c_n * tau_den - np.sqrt(r_max2 + rho_z**2)

    cand = [s_lower(np.full_like(dt, -L)), s_lower(np.full_like(dt, L))]
    for edge in (-half_t, half_t):
        z_edge = np.clip((edge - dt) / beta, -L, L)
        cand.append(s_lower(z_edge))
    cand.append(s_lower(kink))
    s_min = np.minimum.reduce(cand)
    return s_min, s_max


def classify_arrays(dx, dy, dt, half_x, half_t, L, c_n, beta):
    """Vectorized classification; returns (labels, margins) arrays."""
    s_min, s_max = _s_extrema(dx, dy, dt, half_x, half_t, L, c_n, beta)
    labels = np.where(s_max < 0.0, "I", np.where(s_min > 0.0, "III", "II"))
    margins = np.where(s_max < 0.0, -s_max,
                       np.where(s_min > 0.0, s_min,
                                np.minimum(s_max, -s_min)))
    return labels, margins


def classify_numeric(p1, p2, medium, threshold=SUPPORT_THRESHOLD):
    """Region label for one pulse pair in a given medium.

    For dispersive media the light-cone speed uses the low-frequency
    phase index n(omega -> 0) (recorded in run metadata by the callers).
    """
    hx1, ht1 = support_halfwidths(p1, threshold)
    hx2, ht2 = support_halfwidths(p2, threshold)
    if p1.crystal_length != p2.crystal_length or p1.group_index != p2.group_index:
        raise ValueError("pulses must share crystal length and group index")
    n = medium_mod.phase_index_dc(medium)
    c_n = units.C_UM_FS / n
    labels, margins = classify_arrays(
        p1.center_x - p2.center_x, p1.center_y - p2.center_y,
        p1.delay - p2.delay, hx1 + hx2, ht1 + ht2,
        p1.crystal_length, c_n, p1.beta,
    )
    return RegionLabel(label=str(labels), margin=float(margins))


def boundary_I_II(delta_t, params):
    """Analytic I/II boundary delta_r(delta_t); valid for delta_r >> w."""
    arg = params.c_n * (delta_t + params.duration) + params.retard
    radicand = arg**2 - params.crystal_length**2
    if np.any(np.asarray(radicand) < 0.0) or np.any(np.asarray(arg) < 0.0):
        raise BoundaryDomainError(
            f"I/II boundary undefined at delta_t={delta_t}: radicand < 0"
        )
    return params.waist + np.sqrt(radicand)


def boundary_II_III(delta_t, params):
    """Analytic II/III boundary delta_r(delta_t).

    Implemented with the dimensionally consistent L*n_g/n retardation
    term and restricted to the future branch
    c_n*(delta_t - tau_p) >= L*n_g/n + L (validity also needs
    c_n*delta_t >> w and delta_r > w).
    """
    arg = params.c_n * (delta_t - params.duration) - params.retard
    if np.any(np.asarray(arg) < params.crystal_length):
        raise BoundaryDomainError(
            f"II/III boundary undefined at delta_t={delta_t}: "
            "outside the future-branch validity domain"
        )
    return -params.waist + np.sqrt(arg**2 - params.crystal_length**2)


def solve_boundary_delta_t(boundary, delta_r, params, bracket=(0.0, 1e5)):
    """Invert a boundary curve: delta_t at which boundary(delta_t) = delta_r."""
    from scipy.optimize import brentq

    def fn(dt):
        try:
            return boundary(dt, params) - delta_r
        except BoundaryDomainError:
            return -delta_r

    return brentq(fn, bracket[0], bracket[1], xtol=1e-6)


def region_map(p1, p2, medium, delta_r_values, delta_t_values,
               threshold=SUPPORT_THRESHOLD):
    """Grid of labels over (delta_r, delta_t) plus analytic overlay curves.

    Returns (labels, margins, curves) where labels/margins have shape
    (len(delta_r_values), len(delta_t_values)) and curves is a dict with
    the analytic boundary samples (NaN where undefined).
    """
    hx1, ht1 = support_halfwidths(p1, threshold)
    hx2, ht2 = support_halfwidths(p2, threshold)
    n = medium_mod.phase_index_dc(medium)
    c_n = units.C_UM_FS / n
    dr = np.asarray(delta_r_values, dtype=float)
    dt = np.asarray(delta_t_values, dtype=float)
    DR, DT = np.meshgrid(dr, dt, indexing="ij")
    labels, margins = classify_arrays(
        DR, np.zeros_like(DR), DT, hx1 + hx2, ht1 + ht2,
        p1.crystal_length, c_n, p1.beta,
    )
    params = GeometryParams(
        waist=p1.waist, duration=p1.duration,
        crystal_length=p1.crystal_length, n=n, n_g=p1.group_index,
    )
    curve_i_ii = np.full(dt.shape, np.nan)
    curve_ii_iii = np.full(dt.shape, np.nan)
    for i, t in enumerate(dt):
        try:
            curve_i_ii[i] = boundary_I_II(float(t), params)
        except BoundaryDomainError:
            pass
        try:
            curve_ii_iii[i] = boundary_II_III(float(t), params)
        except BoundaryDomainError:
            pass
    curves = {"delta_t_fs": dt, "delta_r_I_II_um": curve_i_ii,
              "delta_r_II_III_um": curve_ii_iii}
    return labels, margins, curves
