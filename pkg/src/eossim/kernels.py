"""Vacuum two-point correlation C and response R of the THz field.

Two evaluation modes share one KernelSet interface:

* analytic (dispersionless): closed forms.  The response is a pure
  light-cone distribution, kept symbolic as delta weights (w0, w1, w2)
  multiplying delta, delta', delta'' in s = rho/c_n - tau; the
  correlation is the matching principal-value pole expansion.  This
  preserves exact light-cone support for the causality results.

* spectral (any medium): the xx-component of the homogeneous-medium
  Green function with complex k = n(omega)*omega/c,

      R(rho, w) = mu0*[w^2 g + c_n(w)^2 (g'' rho_x^2/rho^2
                                         + g' (1 - rho_x^2/rho^2)/rho)],
      g = exp(i k rho)/(4 pi rho),  c_n(w) = c/n(w),

  and the zero-temperature relation C(rho, w) = hbar*sign(w)*Im R(rho, w)
  holds pointwise by construction.  Time-domain values in this mode are
  windowed band-limited inverse transforms (documented approximation).

Both modes coincide in the dispersionless limit; the analytic delta
weights are exactly the polynomial coefficients of the spectral form,
which fixes the sign convention of the d'Alembertian once and for all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import medium as medium_mod
from . import units


class CoincidenceError(ValueError):
    """Kernel queried at rho = 0 (coincidence limit excluded)."""


class LightConeSingularityError(ValueError):
    """Pointwise dispersionless query exactly on the light cone."""


class ModeError(ValueError):
    """Operation unavailable in the kernel set's evaluation mode."""


def band_window(omega, omega_max, taper_fraction=0.2):
    """Band window: flat top, smooth-bump rolloff to zero at omega_max.

    The taper is the C-infinity transition sigma(x) built from
    f(x) = exp(-1/x); every derivative vanishes at both taper junctions.
    An ordinary cosine taper has a curvature jump where it meets the flat
    top, which makes band-limited inverse transforms of the (w^2-growing)
    response kernel ring at the same algebraic order as the off-cone
    values themselves; the smooth bump suppresses that ring faster than
    any power of the band width.
    """
    om = np.abs(np.asarray(omega, dtype=float))
    w = np.ones_like(om)
    if taper_fraction > 0.0:
        edge = (1.0 - taper_fraction) * omega_max
        x = np.clip((om - edge) / (omega_max - edge), 0.0, 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            fx = np.where(x > 0.0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
            f1x = np.where(x < 1.0, np.exp(-1.0 / np.maximum(1.0 - x, 1e-300)), 0.0)
        w = np.where(om > edge, f1x / (fx + f1x), w)
    w = np.where(om > omega_max, 0.0, w)
    return w


@dataclass(frozen=True)
class LightConeWeights:
    """Symbolic delta weights of the dispersionless response at one rho.

    R(rho, tau) = (mu0/4pi) * [w0*delta(s) + w1*delta'(s) + w2*delta''(s)]
    with s = tau_arrival - tau and tau_arrival = rho/c_n.  All weights are
    exactly zero off the cone by construction; causality tests rely on
    this representation never being numerically broadened.
    """

    tau_arrival: float
    w0: float
    w1: float
    w2: float


def _cone_weight_arrays(rho_x, rho_y, rho_z, c_n):
    rho2 = rho_x**2 + rho_y**2 + rho_z**2
    rho = np.sqrt(rho2)
    if np.any(rho == 0.0):
        raise CoincidenceError("kernel evaluated at rho = 0")
    frac = rho_x**2 / rho2
    w0 = c_n**2 * (3.0 * frac - 1.0) / rho**3
    w1 = c_n * (1.0 - 3.0 * frac) / rho**2
    w2 = -(1.0 - frac) / rho
    return rho / c_n, w0, w1, w2


class KernelSet:
    """Evaluable C and R kernels for one medium.

    mode "auto" picks analytic for dispersionless media and spectral
    otherwise.  The spectral frequency band is [0, omega_max], clipped to
    the validated band for tabulated media, discretized with n_omega
    uniform nodes and closed with a cosine taper over the top
    window_fraction of the band.
    """

    def __init__(self, medium, mode="auto", omega_max=None, n_omega=2048,
                 window_fraction=0.2, lightcone_atol=1e-9):
        if mode == "auto":
            mode = "analytic" if medium_mod.is_dispersionless(medium) else "spectral"
        if mode == "analytic" and not medium_mod.is_dispersionless(medium):
            raise ModeError("analytic mode requires a dispersionless medium")
        if mode not in ("analytic", "spectral"):
            raise ModeError(f"unknown mode {mode!r}")
        self.medium = medium
        self.mode = mode
        self.lightcone_atol = lightcone_atol
        if omega_max is None:
            omega_max = units.thz_to_rad_fs(15.0)
        omega_lo = 0.0
        if isinstance(medium, medium_mod.PermittivityTable):
            lo, hi = medium.band
            omega_lo = lo
            omega_max = min(omega_max, hi)
        self.omega_grid = np.linspace(omega_lo, omega_max, int(n_omega))
        self.window_fraction = float(window_fraction)
        self.window = band_window(self.omega_grid, omega_max, window_fraction)
        self._trapz = np.full(self.omega_grid.size,
                              self.omega_grid[1] - self.omega_grid[0])
        self._trapz[0] *= 0.5
        self._trapz[-1] *= 0.5

    # --- dispersionless helpers ---------------------------------------
    @property
    def c_n(self):
        """In-medium light-cone speed c/n (analytic mode only)."""
        if self.mode != "analytic":
            raise ModeError("c_n is only defined for the dispersionless mode")
        return units.C_UM_FS / self.medium.n

    def response_delta_weights(self, rho_x, rho_y, rho_z):
        """Light-cone delta weights of R at one separation (analytic mode)."""
        if self.mode != "analytic":
            raise ModeError("delta weights exist only in analytic mode")
        a, w0, w1, w2 = _cone_weight_arrays(
            np.asarray(rho_x, dtype=float), np.asarray(rho_y, dtype=float),
            np.asarray(rho_z, dtype=float), self.c_n)
        scale = units.MU0 / (4.0 * math.pi)
        if np.ndim(a) == 0:
            return LightConeWeights(float(a), float(scale * w0),
                                    float(scale * w1), float(scale * w2))
        return a, scale * w0, scale * w1, scale * w2

    # --- frequency domain ----------------------------------------------
    def response_spectral(self, rho_x, rho_y, rho_z, omega):
        """Complex response kernel R(rho, omega); broadcasts over inputs."""
        rho_x = np.asarray(rho_x, dtype=float)
        rho_y = np.asarray(rho_y, dtype=float)
        rho_z = np.asarray(rho_z, dtype=float)
        om = np.asarray(omega, dtype=float)
        rho2 = rho_x**2 + rho_y**2 + rho_z**2
        rho = np.sqrt(rho2)
        if np.any(rho == 0.0):
            raise CoincidenceError("kernel evaluated at rho = 0")
        mag = np.abs(om)
        n = medium_mod.refractive_index(self.medium, mag)
        n = np.asarray(n, dtype=complex)
        k = n * mag / units.C_UM_FS
        c_n2 = (units.C_UM_FS / n) ** 2
        g = np.exp(1j * k * rho) / (4.0 * math.pi * rho)
        gp = (1j * k - 1.0 / rho) * g
        gpp = (-(k**2) - 2j * k / rho + 2.0 / rho2) * g
        frac = rho_x**2 / rho2
        val = units.MU0 * (mag**2 * g + c_n2 * (gpp * frac + gp * (1.0 - frac) / rho))
        val = np.where(om < 0.0, np.conj(val), val)
        return complex(val) if val.ndim == 0 else val

    def correlation_spectral(self, rho_x, rho_y, rho_z, omega):
        """C(rho, omega) = hbar * sign(omega) * Im R(rho, omega); real."""
        r = self.response_spectral(rho_x, rho_y, rho_z, omega)
        return units.HBAR * np.sign(np.asarray(omega, dtype=float)) * np.imag(r)

    # --- time domain -----------------------------------------------------
    def _check_cone(self, s, a):
        if np.any(np.abs(s) <= self.lightcone_atol * np.maximum(1.0, np.abs(a))):
            raise LightConeSingularityError(
                "query on the light cone; use the symbolic delta weights or "
                "PV quadrature instead of pointwise evaluation"
            )

    def response_time(self, rho_x, rho_y, rho_z, tau):
        """Pointwise R(rho, tau).

        Analytic mode: exactly zero off the light cone (and for tau < 0);
        exactly on the cone the value is distributional, raises
        LightConeSingularityError (see response_delta_weights).  Spectral
        mode: windowed band-limited inverse transform sample.
        """
        tau = np.asarray(tau, dtype=float)
        if self.mode == "analytic":
            rho = np.sqrt(np.asarray(rho_x, float)**2 + np.asarray(rho_y, float)**2
                          + np.asarray(rho_z, float)**2)
            if np.any(rho == 0.0):
                raise CoincidenceError("kernel evaluated at rho = 0")
            a = rho / self.c_n
            self._check_cone(a - tau, a)
            return np.zeros(np.broadcast(rho, tau).shape) if tau.ndim or np.ndim(rho) \
                else 0.0
        om = self.omega_grid
        rt = self.response_spectral(np.asarray(rho_x, float)[..., None],
                                    np.asarray(rho_y, float)[..., None],
                                    np.asarray(rho_z, float)[..., None], om)
        phase = np.exp(-1j * om * tau[..., None])
        val = np.sum(self._trapz * self.window * np.real(rt * phase), axis=-1) / math.pi
        return float(val) if val.ndim == 0 else val

    def correlation_time(self, rho_x, rho_y, rho_z, tau):
        """Pointwise C(rho, tau).

        Analytic mode: closed-form pole expansion (PV poles at
        tau = +-rho/c_n are excluded pointwise; integration across them
        must use PV quadrature).  Spectral mode: windowed cosine
        transform of C(rho, omega).
        """
        tau = np.asarray(tau, dtype=float)
        if self.mode == "analytic":
            rx = np.asarray(rho_x, dtype=float)
            ry = np.asarray(rho_y, dtype=float)
            rz = np.asarray(rho_z, dtype=float)
            a, w0, w1, w2 = _cone_weight_arrays(rx, ry, rz, self.c_n)
            s_plus = a - tau
            s_minus = a + tau
            self._check_cone(s_plus, a)
            self._check_cone(s_minus, a)
            val = (w0 * (1.0 / s_plus + 1.0 / s_minus)
                   - w1 * (1.0 / s_plus**2 + 1.0 / s_minus**2)
                   + 2.0 * w2 * (1.0 / s_plus**3 + 1.0 / s_minus**3))
            val *= units.MU0 * units.HBAR / (8.0 * math.pi**2)
            return float(val) if val.ndim == 0 else val
        om = self.omega_grid
        ct = self.correlation_spectral(np.asarray(rho_x, float)[..., None],
                                       np.asarray(rho_y, float)[..., None],
                                       np.asarray(rho_z, float)[..., None], om)
        val = np.sum(self._trapz * self.window * ct
                     * np.cos(om * tau[..., None]), axis=-1) / math.pi
        return float(val) if val.ndim == 0 else val

    def split_response(self):
        """Evaluators (R', R'') with R = R' + R'' for tau > 0.

        R'(rho, tau) = [R(rho, tau) + R(rho, -tau)]/2 (even in tau),
        R'' the odd counterpart.  Analytic mode: both vanish off the
        light cone and raise on it, like response_time.  Spectral mode:
        band-limited transforms of Re R and i Im R.
        """
        if self.mode == "analytic":
            def r_prime(rho_x, rho_y, rho_z, tau):
                tau = np.asarray(tau, dtype=float)
                half = self.response_time(rho_x, rho_y, rho_z, tau)
                other = self.response_time(rho_x, rho_y, rho_z, -tau)
                return 0.5 * (half + other)

            def r_dprime(rho_x, rho_y, rho_z, tau):
                tau = np.asarray(tau, dtype=float)
                half = self.response_time(rho_x, rho_y, rho_z, tau)
                other = self.response_time(rho_x, rho_y, rho_z, -tau)
                return 0.5 * (half - other)

            return r_prime, r_dprime

        def r_prime(rho_x, rho_y, rho_z, tau):
            tau = np.asarray(tau, dtype=float)
            om = self.omega_grid
            rt = self.response_spectral(np.asarray(rho_x, float)[..., None],
                                        np.asarray(rho_y, float)[..., None],
                                        np.asarray(rho_z, float)[..., None], om)
            val = np.sum(self._trapz * self.window * np.real(rt)
                         * np.cos(om * tau[..., None]), axis=-1) / math.pi
            return float(val) if val.ndim == 0 else val

        def r_dprime(rho_x, rho_y, rho_z, tau):
            tau = np.asarray(tau, dtype=float)
            om = self.omega_grid
            rt = self.response_spectral(np.asarray(rho_x, float)[..., None],
                                        np.asarray(rho_y, float)[..., None],
                                        np.asarray(rho_z, float)[..., None], om)
            val = np.sum(self._trapz * self.window * np.imag(rt)
                         * np.sin(om * tau[..., None]), axis=-1) / math.pi
            return float(val) if val.ndim == 0 else val

        return r_prime, r_dprime
