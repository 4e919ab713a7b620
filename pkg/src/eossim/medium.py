"""Crystal optical response in the THz band.

Three variants: a constant real index (dispersionless), a single-phonon
Lorentz oscillator, and a tabulated complex permittivity with cubic
interpolation.  All carry the NIR group index n_g that sets the probe
pulses' transit speed.  Negative frequencies follow the reality
convention eps(-w) = conj(eps(w)).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from . import units
from .fdt import hilbert_transform


class MediumError(ValueError):
    """Inconsistent or unphysical medium specification."""


class FrequencyRangeError(MediumError):
    """Query outside the validated frequency band of a tabulated medium."""


@dataclass(frozen=True)
class Dispersionless:
    """Constant real THz index n, NIR group index n_g."""

    n: float
    n_g: float

    def __post_init__(self):
        if self.n < 1.0:
            raise MediumError(f"refractive index n={self.n} must be >= 1")
        if self.n_g < 1.0:
            raise MediumError(f"group index n_g={self.n_g} must be >= 1")


@dataclass(frozen=True)
class Lorentz:
    """Single-phonon oscillator: eps_inf*(w_LO^2 - w^2 - i*g*w)/(w_TO^2 - w^2 - i*g*w).

    Frequencies in rad/fs.  Passivity (Im eps >= 0 for w > 0) requires
    omega_lo >= omega_to and gamma >= 0.
    """

    eps_inf: float
    omega_to: float
    omega_lo: float
    gamma: float
    n_g: float

    def __post_init__(self):
        if self.eps_inf <= 0.0:
            raise MediumError(f"eps_inf={self.eps_inf} must be positive")
        if self.omega_to <= 0.0 or self.omega_lo < self.omega_to:
            raise MediumError(
                "Lorentz model needs 0 < omega_TO <= omega_LO "
                f"(got {self.omega_to}, {self.omega_lo})"
            )
        if self.gamma < 0.0:
            raise MediumError(f"gamma={self.gamma} must be >= 0 (passivity)")
        if self.n_g < 1.0:
            raise MediumError(f"group index n_g={self.n_g} must be >= 1")


# GaP-like defaults: reproduce n(0) ~ 3.31, within ~1% of the constant
# THz index 3.33 used by the dispersionless runs.  Config-overridable.
GAP_LORENTZ = dict(eps_inf=9.09, omega_to_thz=10.98, omega_lo_thz=12.06,
                   gamma_thz=0.02)


def gap_lorentz(n_g=3.556, **overrides):
    """Construct the default GaP-like Lorentz medium."""
    p = dict(GAP_LORENTZ)
    p.update(overrides)
    return Lorentz(
        eps_inf=p["eps_inf"],
        omega_to=units.thz_to_rad_fs(p["omega_to_thz"]),
        omega_lo=units.thz_to_rad_fs(p["omega_lo_thz"]),
        gamma=units.thz_to_rad_fs(p["gamma_thz"]),
        n_g=n_g,
    )


@dataclass(frozen=True)
class PermittivityTable:
    """Tabulated complex permittivity over a strictly increasing grid."""

    omega: np.ndarray          # rad/fs, strictly increasing, > 0
    re_eps: np.ndarray
    im_eps: np.ndarray
    n_g: float
    _re_spline: CubicSpline = field(repr=False, compare=False, default=None)
    _im_spline: CubicSpline = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=float)
        re = np.asarray(self.re_eps, dtype=float)
        im = np.asarray(self.im_eps, dtype=float)
        if om.size < 8:
            raise MediumError(f"table needs at least 8 samples, got {om.size}")
        if np.any(np.diff(om) <= 0.0):
            idx = int(np.argmax(np.diff(om) <= 0.0))
            raise MediumError(
                f"table frequencies must be strictly increasing; violation "
                f"after sample {idx + 1}"
            )
        if om[0] <= 0.0:
            raise MediumError("table frequencies must be positive")
        if np.any(im < 0.0):
            idx = int(np.argmax(im < 0.0))
            raise MediumError(
                f"passivity violated: Im eps < 0 at sample {idx + 1} "
                f"(omega = {units.rad_fs_to_thz(om[idx]):.4g} THz)"
            )
        if self.n_g < 1.0:
            raise MediumError(f"group index n_g={self.n_g} must be >= 1")
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "re_eps", re)
        object.__setattr__(self, "im_eps", im)
        # separate cubic interpolation of Re and Im keeps the kernels smooth
        object.__setattr__(self, "_re_spline", CubicSpline(om, re))
        object.__setattr__(self, "_im_spline", CubicSpline(om, im))

    @property
    def band(self):
        """Validated frequency band (rad/fs)."""
        return float(self.omega[0]), float(self.omega[-1])


def load_permittivity_table(path, n_g=3.556):
    """Read a permittivity CSV (header omega_THz,re_eps,im_eps) into a medium."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MediumError(f"cannot read permittivity table {path}: {exc}") from exc
    reader = csv.reader(text.splitlines())
    rows = list(reader)
    if not rows:
        raise MediumError(f"{path}: empty permittivity table")
    header = [h.strip() for h in rows[0]]
    if header != ["omega_THz", "re_eps", "im_eps"]:
        raise MediumError(
            f"{path}: line 1: expected header 'omega_THz,re_eps,im_eps', "
            f"got {','.join(header)!r}"
        )
    om, re, im = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise MediumError(f"{path}: line {lineno}: expected 3 columns, got {len(row)}")
        try:
            f_thz, re_v, im_v = (float(c) for c in row)
        except ValueError as exc:
            raise MediumError(f"{path}: line {lineno}: {exc}") from exc
        om.append(units.thz_to_rad_fs(f_thz))
        re.append(re_v)
        im.append(im_v)
    try:
        return PermittivityTable(np.array(om), np.array(re), np.array(im), n_g=n_g)
    except MediumError as exc:
        raise MediumError(f"{path}: {exc}") from exc


Medium = (Dispersionless, Lorentz, PermittivityTable)


def permittivity(medium, omega):
    """Complex permittivity eps(omega); omega in rad/fs, scalar or array.

    Negative frequencies return conj(eps(|omega|)).  Table media raise
    FrequencyRangeError outside their sampled band (no extrapolation).
    """
    om = np.asarray(omega, dtype=float)
    scalar = om.ndim == 0
    om = np.atleast_1d(om)
    mag = np.abs(om)
    if isinstance(medium, Dispersionless):
        eps = np.full(om.shape, medium.n**2, dtype=complex)
    elif isinstance(medium, Lorentz):
        den = medium.omega_to**2 - mag**2 - 1j * medium.gamma * mag
        num = medium.omega_lo**2 - mag**2 - 1j * medium.gamma * mag
        eps = medium.eps_inf * num / den
    elif isinstance(medium, PermittivityTable):
        lo, hi = medium.band
        if np.any(mag < lo - 1e-12) or np.any(mag > hi + 1e-12):
            bad = mag[(mag < lo - 1e-12) | (mag > hi + 1e-12)]
            raise FrequencyRangeError(
                f"frequency {units.rad_fs_to_thz(float(bad.flat[0])):.4g} THz outside "
                f"validated band [{units.rad_fs_to_thz(lo):.4g}, "
                f"{units.rad_fs_to_thz(hi):.4g}] THz"
            )
        eps = medium._re_spline(mag) + 1j * medium._im_spline(mag)
    else:
        raise TypeError(f"unknown medium type {type(medium)!r}")
    eps = np.where(om < 0.0, np.conj(eps), eps)
    return complex(eps[0]) if scalar else eps


def refractive_index(medium, omega):
    """Principal square root of eps with Im n >= 0 (decaying waves)."""
    eps = permittivity(medium, omega)
    n = np.sqrt(np.asarray(eps, dtype=complex))
    n = np.where(n.imag < 0.0, -n, n)
    if np.ndim(omega) == 0:
        return complex(n.flat[0])
    return n


def group_index(medium):
    """NIR group index governing probe-pulse propagation."""
    return medium.n_g


def phase_index_dc(medium):
    """Low-frequency THz phase index used for light-cone classification."""
    if isinstance(medium, Dispersionless):
        return medium.n
    if isinstance(medium, Lorentz):
        return float(np.sqrt(medium.eps_inf * medium.omega_lo**2 / medium.omega_to**2))
    if isinstance(medium, PermittivityTable):
        return float(np.real(refractive_index(medium, medium.band[0])))
    raise TypeError(f"unknown medium type {type(medium)!r}")


def is_dispersionless(medium):
    return isinstance(medium, Dispersionless)


def kramers_kronig_residual(medium, omega_grid=None, eps_inf=None):
    """Max relative Kramers-Kronig mismatch of Re eps over the grid.

    Checks |Re eps(w) - eps_inf - (2/pi) PV int W Im eps(W)/(W^2-w^2) dW|
    relative to |eps(w)|, with the PV quadrature windowed to the sampled
    band (no extrapolation).  Dispersionless media return 0 by definition.
    Band truncation limits the achievable residual; a causal model on a
    dense, wide grid lands well below 0.05.

    The supplied grid fixes the band and resolution; internally the band
    is resampled uniformly from zero so the PV convolution has a
    symmetric odd extension.  For tabulated media Im eps is taken as zero
    below the first sample (part of the documented truncation error).
    """
    if isinstance(medium, Dispersionless):
        return 0.0
    if omega_grid is None:
        if isinstance(medium, PermittivityTable):
            lo, hi = medium.band
            omega_grid = np.linspace(lo, hi, 4097)
        else:
            omega_grid = np.linspace(units.thz_to_rad_fs(60.0) / 16384,
                                     units.thz_to_rad_fs(60.0), 16384)
    grid = np.asarray(omega_grid, dtype=float)
    if eps_inf is None:
        if isinstance(medium, Lorentz):
            eps_inf = medium.eps_inf
        else:
            eps_inf = float(np.mean(medium.re_eps[-4:]))

    n = grid.size
    omega_max = float(grid[-1])
    step = omega_max / n
    om = step * np.arange(1, n + 1)

    if isinstance(medium, PermittivityTable):
        lo, hi = medium.band
        valid = (om >= lo) & (om <= hi)
        im = np.zeros_like(om)
        im[valid] = medium._im_spline(om[valid])
        re = np.zeros_like(om)
        re[valid] = medium._re_spline(om[valid])
    else:
        eps = permittivity(medium, om)
        valid = np.ones(om.shape, bool)
        im = eps.imag
        re = eps.real

    # odd extension of Im eps onto the uniform full line, then the PV
    # convolution: Re eps(w) - eps_inf = (1/pi) PV int Im(W)/(W-w) dW = -H[Im](w)
    f_odd = np.concatenate([-im[::-1], [0.0], im])
    h = hilbert_transform(f_odd, step)
    kk_real = eps_inf - h[n + 1:]

    eps_abs = np.hypot(re, im)
    with np.errstate(divide="ignore", invalid="ignore"):
        resid = np.abs(re - kk_real) / eps_abs
    resid = np.where(valid & (eps_abs > 0.0), resid, 0.0)
    # drop the outer 10% of the band where the PV window is one-sided
    n_edge = max(1, n // 10)
    return float(np.max(resid[:-n_edge]))
