"""Shared brute-force oracles for the overlap-kernel reduction.

Both the unit tests and the acceptance suite compare the reduced
(kernel-correlation) integrals against direct evaluations of the full
double space-time integral: nested adaptive quadrature and plain
Monte-Carlo sampling over the envelope supports.
"""

import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import dblquad

from eossim.pulses import PulseEnvelope, overlap_kernel

_GX, _GW = leggauss(48)


def _nodes(a, b):
    return 0.5 * (a + b) + 0.5 * (b - a) * _GX, 0.5 * (b - a) * _GW


def _split_nodes(a, mid, b):
    x1, w1 = _nodes(a, mid)
    x2, w2 = _nodes(mid, b)
    return np.concatenate([x1, x2]), np.concatenate([w1, w2])


def smooth_test_kernel():
    """Separable smooth stand-in F(rho, tau) for the physical kernels."""
    fx = lambda u: np.exp(-0.5 * ((u - 10.0) / 9.0) ** 2) * (1 + 0.3 * u / 12.0)
    fy = lambda u: np.exp(-0.5 * (u / 11.0) ** 2)
    fz = lambda u: np.exp(-0.5 * (u / 13.0) ** 2)
    ft = lambda u: np.exp(-0.5 * ((u - 120.0) / 90.0) ** 2) \
        * (1 + 0.2 * np.sin(u / 60.0))
    return fx, fy, fz, ft


def small_rect_pair(dr=12.0, dt=150.0, w=8.0, tp=50.0, L=16.0):
    par = dict(waist=w, duration=tp, crystal_length=L, group_index=3.556)
    return (PulseEnvelope("rect", center_x=dr, delay=dt, **par),
            PulseEnvelope("rect", **par))


def reduced_integral(p1, p2, factors):
    """int K12 * F via the closed-form kernel on split Gauss grids."""
    fx, fy, fz, ft = factors
    k = overlap_kernel(p1, p2)
    beta = p1.beta
    w, L = p1.waist, p1.crystal_length
    xs, wxs = _split_nodes(k.dx - w, k.dx, k.dx + w)
    ys, wys = _split_nodes(k.dy - w, k.dy, k.dy + w)
    zs, wzs = _split_nodes(-L, 0.0, L)
    total = 0.0
    for z, wz in zip(zs, wzs):
        mid_t = k.dt + beta * z
        ts, wts = _split_nodes(mid_t - p1.duration, mid_t, mid_t + p1.duration)
        vx = k.transverse(xs - k.dx) * fx(xs)
        vy = k.transverse(ys - k.dy) * fy(ys)
        vt = k.temporal(ts - k.dt - beta * z) * ft(ts)
        total += (wz * k.longitudinal(z) * fz(z)
                  * np.dot(wxs, vx) * np.dot(wys, vy) * np.dot(wts, vt))
    return total


def direct_nested_integral(p1, p2, factors):
    """int L1 L2 F by nested adaptive quadrature, no correlation reduction."""
    fx, fy, fz, ft = factors
    beta = p1.beta
    w, tp, L = p1.waist, p1.duration, p1.crystal_length

    def gate_block(f, c1, c2, half):
        val, _ = dblquad(
            lambda b, a: f(a - b),
            c1 - half, c1 + half, lambda a: c2 - half, lambda a: c2 + half,
            epsabs=1e-13, epsrel=1e-11)
        return val / (2 * half) ** 2

    bx = gate_block(fx, p1.center_x, p2.center_x, w / 2)
    by = gate_block(fy, p1.center_y, p2.center_y, w / 2)

    zs, wzs = _nodes(-L / 2, L / 2)
    zt = 0.0
    for z1, wz1 in zip(zs, wzs):
        c1 = p1.delay + (z1 + L / 2) * beta
        inner = np.zeros(len(zs))
        for j, z2 in enumerate(zs):
            c2 = p2.delay + (z2 + L / 2) * beta
            val, _ = dblquad(
                lambda t2, t1: ft(t1 - t2),
                c1 - tp / 2, c1 + tp / 2,
                lambda t1: c2 - tp / 2, lambda t1: c2 + tp / 2,
                epsabs=1e-12, epsrel=1e-9)
            inner[j] = val / tp**2 * fz(z1 - z2)
        zt += wz1 * np.dot(wzs, inner) / L**2
    return bx * by * zt


def monte_carlo_integral(p1, p2, F, n=400_000, seed=12345):
    """Uniform-sampling estimate of int L1 L2 F and its standard error."""
    rng = np.random.default_rng(seed)
    w, tp, L = p1.waist, p1.duration, p1.crystal_length

    def sample(p):
        x = p.center_x + rng.uniform(-w / 2, w / 2, n)
        y = p.center_y + rng.uniform(-w / 2, w / 2, n)
        z = rng.uniform(-L / 2, L / 2, n)
        t = p.delay + (z + L / 2) * p.beta + rng.uniform(-tp / 2, tp / 2, n)
        return x, y, z, t

    x1, y1, z1, t1 = sample(p1)
    x2, y2, z2, t2 = sample(p2)
    vals = F(x1 - x2, y1 - y2, z1 - z2, t1 - t2)
    return vals.mean(), vals.std(ddof=1) / math.sqrt(n)
