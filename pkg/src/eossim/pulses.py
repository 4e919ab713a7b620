"""Probe-pulse envelopes inside the crystal and their overlap kernel.

Each envelope is a normalized product of a transverse profile, a temporal
gate taken at the group-retarded time t - (z + L/2)*n_g/c, and a hard
crystal gate z in [-L/2, L/2].  Both pulses ride at the same group speed,
so their 4-D space-time cross-correlation factorizes exactly:

    K12(rho, tau) = X(rho_x - dx) * Y(rho_y - dy) * Z(rho_z)
                      * Theta(tau - dt - beta*rho_z)

with X, Y the transverse-profile correlations (triangles for rectangular
pulses, sqrt(2)-widened Gaussians for Gaussian ones), Z the triangle of
half-width L from the two crystal gates, Theta the temporal-gate
correlation, beta = n_g/c, and (dx, dy, dt) the pulse-center offsets.
The kernel integrates to the product of the pulse normalizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import units

# FWHM = 2*sqrt(2*ln 2) * sigma for Gaussian profiles
FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))
# Gaussian kernels are truncated at this many (correlated) sigmas
GAUSS_EXTENT_SIGMAS = 6.0

_SHAPES = ("rect", "gauss")


class PulseShapeError(ValueError):
    """Unknown shape or incompatible pulse pair."""


class GridResolutionError(ValueError):
    """Requested grid cannot resolve the pulse duration or waist."""


@dataclass(frozen=True)
class PulseEnvelope:
    """One probe pulse: shape, waist w (um), duration tau_p (fs, FWHM for
    Gaussian), transverse center, launch delay, and the crystal it
    traverses (length L at group speed c/n_g)."""

    shape: str
    waist: float
    duration: float
    crystal_length: float
    group_index: float
    center_x: float = 0.0
    center_y: float = 0.0
    delay: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise PulseShapeError(f"shape must be one of {_SHAPES}, got {self.shape!r}")
        if self.waist <= 0.0:
            raise PulseShapeError(f"waist={self.waist} must be positive")
        if self.duration <= 0.0:
            raise PulseShapeError(f"duration={self.duration} must be positive")
        if self.crystal_length <= 0.0:
            raise PulseShapeError(f"crystal_length={self.crystal_length} must be positive")
        if self.group_index < 1.0:
            raise PulseShapeError(f"group_index={self.group_index} must be >= 1")

    @property
    def beta(self):
        """Inverse group speed n_g/c [fs/um]."""
        return self.group_index / units.C_UM_FS


def _gauss_pdf(u, sigma):
    return np.exp(-0.5 * (u / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))


def envelope_value(pulse, x, y, z, t):
    """Envelope density L_i(r, t); zero outside the crystal."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    L = pulse.crystal_length
    s = t - pulse.delay - (z + 0.5 * L) * pulse.beta
    in_crystal = np.abs(z) < 0.5 * L
    if pulse.shape == "rect":
        w, tp = pulse.waist, pulse.duration
        inside = (
            (np.abs(x - pulse.center_x) < 0.5 * w)
            & (np.abs(y - pulse.center_y) < 0.5 * w)
            & (np.abs(s) < 0.5 * tp)
            & in_crystal
        )
        val = np.where(inside, pulse.amplitude / (w * w * tp * L), 0.0)
    else:
        sw = pulse.waist * FWHM_TO_SIGMA
        st = pulse.duration * FWHM_TO_SIGMA
        val = (
            pulse.amplitude
            * _gauss_pdf(x - pulse.center_x, sw)
            * _gauss_pdf(y - pulse.center_y, sw)
            * _gauss_pdf(s, st)
            * np.where(in_crystal, 1.0 / L, 0.0)
        )
    return val if val.ndim else float(val)


def _triangle(u, width):
    """Correlation of two unit-area gates of full width `width`."""
    return np.maximum(0.0, width - np.abs(u)) / width**2


@dataclass(frozen=True)
class OverlapKernel:
    """Closed-form space-time cross-correlation of two pulse envelopes."""

    shape: str
    waist: float
    duration: float
    crystal_length: float
    beta: float
    dx: float
    dy: float
    dt: float
    amplitude: float = 1.0

    # --- 1-D factors -------------------------------------------------
    def transverse(self, u):
        """X (and Y) factor evaluated at u = rho_x - dx (or rho_y - dy)."""
        if self.shape == "rect":
            return _triangle(u, self.waist)
        sigma = math.sqrt(2.0) * self.waist * FWHM_TO_SIGMA
        return _gauss_pdf(np.asarray(u, dtype=float), sigma)

    def longitudinal(self, rho_z):
        """Z factor: triangle of half-width L from the two crystal gates."""
        return _triangle(rho_z, self.crystal_length)

    def temporal(self, s):
        """Theta factor at s = tau - dt - beta*rho_z."""
        if self.shape == "rect":
            return _triangle(s, self.duration)
        sigma = math.sqrt(2.0) * self.duration * FWHM_TO_SIGMA
        return _gauss_pdf(np.asarray(s, dtype=float), sigma)

    def temporal_spectrum(self, omega):
        """Fourier transform of the temporal factor, int Theta(s) e^{i w s} ds."""
        omega = np.asarray(omega, dtype=float)
        if self.shape == "rect":
            return np.sinc(omega * self.duration / (2.0 * math.pi)) ** 2
        st = self.duration * FWHM_TO_SIGMA
        return np.exp(-(st * omega) ** 2)

    # --- supports ----------------------------------------------------
    @property
    def transverse_halfwidth(self):
        if self.shape == "rect":
            return self.waist
        return GAUSS_EXTENT_SIGMAS * math.sqrt(2.0) * self.waist * FWHM_TO_SIGMA

    @property
    def temporal_halfwidth(self):
        if self.shape == "rect":
            return self.duration
        return GAUSS_EXTENT_SIGMAS * math.sqrt(2.0) * self.duration * FWHM_TO_SIGMA

    def __call__(self, rho_x, rho_y, rho_z, tau):
        """K12 value; vectorized over numpy inputs."""
        rho_z = np.asarray(rho_z, dtype=float)
        s = np.asarray(tau, dtype=float) - self.dt - self.beta * rho_z
        val = (
            self.amplitude
            * self.transverse(np.asarray(rho_x, dtype=float) - self.dx)
            * self.transverse(np.asarray(rho_y, dtype=float) - self.dy)
            * self.longitudinal(rho_z)
            * self.temporal(s)
        )
        return val if val.ndim else float(val)

    def swapped(self):
        """Kernel for the exchanged pulse pair: K21(rho,tau) = K12(-rho,-tau)."""
        return OverlapKernel(
            shape=self.shape, waist=self.waist, duration=self.duration,
            crystal_length=self.crystal_length, beta=self.beta,
            dx=-self.dx, dy=-self.dy, dt=-self.dt, amplitude=self.amplitude,
        )


def overlap_kernel(p1, p2):
    """Build K12 for two pulses sharing one crystal and group speed."""
    if p1.shape != p2.shape:
        raise PulseShapeError("mixed pulse shapes are not supported")
    if p1.crystal_length != p2.crystal_length:
        raise PulseShapeError("pulses must share the same crystal length")
    if p1.group_index != p2.group_index:
        raise PulseShapeError("pulses must share the same group index")
    if p1.waist != p2.waist or p1.duration != p2.duration:
        raise PulseShapeError(
            "unequal waists or durations are not supported; the closed-form "
            "correlation assumes an identical pulse pair"
        )
    return OverlapKernel(
        shape=p1.shape,
        waist=p1.waist,
        duration=p1.duration,
        crystal_length=p1.crystal_length,
        beta=p1.beta,
        dx=p1.center_x - p2.center_x,
        dy=p1.center_y - p2.center_y,
        dt=p1.delay - p2.delay,
        amplitude=p1.amplitude * p2.amplitude,
    )


@dataclass(frozen=True)
class PointMassComb:
    """Point masses of a triangle factor's second derivative.

    The second derivative of the triangle max(0, width-|u|)/width^2 is
    [delta(u+width) - 2 delta(u) + delta(u-width)]/width^2.
    """

    offsets: tuple
    weights: tuple


@dataclass(frozen=True)
class KernelDerivatives:
    """Second derivatives of an overlap kernel in tau and rho_x.

    Gaussian kernels are smooth: d2_tau / d2_rho_x evaluate pointwise.
    Rectangular kernels carry the jump terms analytically: the combs give
    the delta positions (relative to the factor center) and weights, and
    the corresponding cofactor methods evaluate the remaining smooth
    product.
    """

    kernel: OverlapKernel
    smooth: bool
    tau_comb: PointMassComb = None
    rho_x_comb: PointMassComb = None

    def d2_tau(self, rho_x, rho_y, rho_z, tau):
        if not self.smooth:
            raise PulseShapeError("rectangular kernel: use tau_comb point masses")
        st2 = 2.0 * (self.kernel.duration * FWHM_TO_SIGMA) ** 2
        s = np.asarray(tau, dtype=float) - self.kernel.dt - self.kernel.beta * np.asarray(rho_z, dtype=float)
        return self.kernel(rho_x, rho_y, rho_z, tau) * (s**2 / st2**2 - 1.0 / st2)

    def d2_rho_x(self, rho_x, rho_y, rho_z, tau):
        if not self.smooth:
            raise PulseShapeError("rectangular kernel: use rho_x_comb point masses")
        sw2 = 2.0 * (self.kernel.waist * FWHM_TO_SIGMA) ** 2
        u = np.asarray(rho_x, dtype=float) - self.kernel.dx
        return self.kernel(rho_x, rho_y, rho_z, tau) * (u**2 / sw2**2 - 1.0 / sw2)

    def tau_cofactor(self, rho_x, rho_y, rho_z):
        """K without its temporal factor (multiplies the tau point masses)."""
        k = self.kernel
        return (
            k.amplitude
            * k.transverse(np.asarray(rho_x, dtype=float) - k.dx)
            * k.transverse(np.asarray(rho_y, dtype=float) - k.dy)
            * k.longitudinal(np.asarray(rho_z, dtype=float))
        )

    def rho_x_cofactor(self, rho_y, rho_z, tau):
        """K without its X factor (multiplies the rho_x point masses)."""
        k = self.kernel
        s = np.asarray(tau, dtype=float) - k.dt - k.beta * np.asarray(rho_z, dtype=float)
        return (
            k.amplitude
            * k.transverse(np.asarray(rho_y, dtype=float) - k.dy)
            * k.longitudinal(np.asarray(rho_z, dtype=float))
            * k.temporal(s)
        )


def overlap_kernel_derivatives(kernel):
    """Exact second derivatives of K12 in tau and rho_x.

    Needed to move the d'Alembertian off the distributional response
    kernel; rectangular factors differentiate to point-mass combs, which
    are kept symbolic so the light-cone zeros stay exact.
    """
    if kernel.shape == "gauss":
        return KernelDerivatives(kernel=kernel, smooth=True)
    w, tp = kernel.waist, kernel.duration
    return KernelDerivatives(
        kernel=kernel,
        smooth=False,
        tau_comb=PointMassComb(
            offsets=(-tp, 0.0, tp),
            weights=(1.0 / tp**2, -2.0 / tp**2, 1.0 / tp**2),
        ),
        rho_x_comb=PointMassComb(
            offsets=(-w, 0.0, w),
            weights=(1.0 / w**2, -2.0 / w**2, 1.0 / w**2),
        ),
    )


def overlap_kernel_zt_fft(p1, p2, n_z=256, n_tau=512):
    """FFT cross-correlation oracle for the (rho_z, tau) part of K12.

    Samples the z-t factors of both envelopes on a regular grid and
    cross-correlates them with FFTs.  Returns (rho_z grid, tau grid,
    K_zt values) to be compared against the closed form
    Z(rho_z)*Theta(tau - dt - beta*rho_z); transverse factors are exact
    Gaussians/triangles either way and are left out.  This is a
    validation path, not the production evaluator.
    """
    from scipy.signal import fftconvolve

    if p1.crystal_length != p2.crystal_length or p1.group_index != p2.group_index:
        raise PulseShapeError("pulses must share crystal length and group index")
    L = p1.crystal_length
    beta = p1.beta
    if n_z < 8 or n_tau < 8:
        raise GridResolutionError("need at least 8 samples per feature")
    dz = L / n_z
    t_span = max(p1.duration, p2.duration) * 4.0 + beta * L
    t_lo = min(p1.delay, p2.delay) - t_span
    t_hi = max(p1.delay, p2.delay) + beta * L + t_span
    dt_grid = (t_hi - t_lo) / n_tau
    if dz > L / 8 or dt_grid > min(p1.duration, p2.duration) / 8:
        raise GridResolutionError(
            f"grid {n_z}x{n_tau} cannot resolve the pulse features "
            "(need >= 8 samples per feature)"
        )
    z = (np.arange(n_z) + 0.5) * dz - 0.5 * L
    t = t_lo + (np.arange(n_tau) + 0.5) * dt_grid

    def zt_factor(p):
        s = t[None, :] - p.delay - (z[:, None] + 0.5 * L) * beta
        if p.shape == "rect":
            gate = np.where(np.abs(s) < 0.5 * p.duration, 1.0 / p.duration, 0.0)
        else:
            gate = _gauss_pdf(s, p.duration * FWHM_TO_SIGMA)
        return gate / L

    f1 = zt_factor(p1)
    f2 = zt_factor(p2)
    # K(rho,tau) = int f1(u+rho) f2(u) du  ==  cross-correlation
    k_zt = fftconvolve(f1, f2[::-1, ::-1], mode="full") * dz * dt_grid
    rho_z = (np.arange(2 * n_z - 1) - (n_z - 1)) * dz
    tau = (np.arange(2 * n_tau - 1) - (n_tau - 1)) * dt_grid
    return rho_z, tau, k_zt
