import math

import numpy as np
import pytest

from eossim import units
from eossim.config import load_config
from eossim.integrator import (
    ExactRectEngine, QuadratureOptions, SpectralEngine, assemble_signal,
    integrate_source, integrate_vacuum, scan_delta_t,
)
from eossim.kernels import KernelSet, ModeError
from eossim.medium import Dispersionless, gap_lorentz
from eossim.pulses import PulseEnvelope, overlap_kernel
from eossim.waveplate import coefficients

DISP = Dispersionless(3.33, 3.556)
PAPER = dict(waist=10.0, duration=185.0, crystal_length=100.0,
             group_index=3.556)


def rect_kernel(dt, dr=200.0, amplitude=1.0, **over):
    par = dict(PAPER)
    par.update(over)
    p1 = PulseEnvelope("rect", center_x=dr, delay=dt, amplitude=amplitude, **par)
    p2 = PulseEnvelope("rect", amplitude=amplitude, **par)
    return overlap_kernel(p1, p2)


@pytest.fixture(scope="module")
def analytic_ks():
    return KernelSet(DISP)


def test_assemble_signal_special_angles():
    i_c, i_rp, i_rdp = 1.7, -0.4, 0.9
    # pure vacuum at (pi/2, pi/2)
    assert assemble_signal(coefficients(math.pi / 2, math.pi / 2),
                           i_c, i_rp, i_rdp) == pytest.approx(i_c)
    # difference isolates R''
    g_a = assemble_signal(coefficients(math.pi / 2, math.pi), i_c, i_rp, i_rdp)
    g_b = assemble_signal(coefficients(math.pi, math.pi / 2), i_c, i_rp, i_rdp)
    assert g_a - g_b == pytest.approx(-units.HBAR * i_rdp, rel=1e-12)
    # all-zero coefficients
    from eossim.waveplate import WavePlateCoeffs
    zero = WavePlateCoeffs(theta1=0.0, theta2=0.0, p1=0j, p2=0j,
                           p_vac=0.0, p_s_prime=0.0, p_s_dprime=0.0)
    assert assemble_signal(zero, i_c, i_rp, i_rdp) == 0.0


def test_decomposition_closure(analytic_ks):
    """Any assembled angle pair equals the weighted contribution sum."""
    k = rect_kernel(2000.0)
    eng = ExactRectEngine(k, analytic_ks)
    i_c = eng.vacuum_integral()
    i_rp, i_rdp = eng.source_integrals()
    rng = np.random.default_rng(1)
    for _ in range(10):
        t1 = rng.uniform(math.pi / 2, 3 * math.pi / 2)
        t2 = rng.uniform(math.pi / 2, 3 * math.pi / 2)
        c = coefficients(t1, t2)
        expected = (c.p_vac * i_c
                    - 0.5 * units.HBAR * (c.p_s_prime * i_rp
                                          + c.p_s_dprime * i_rdp))
        assert assemble_signal(c, i_c, i_rp, i_rdp) == expected


def test_source_structurally_zero_outside_region_II(analytic_ks):
    """Dispersionless rectangular g_s is exactly 0.0 in regions I and III."""
    for dt in (0.0, 400.0, 900.0):      # region I at dr = 200
        i_rp, i_rdp = integrate_source(rect_kernel(dt), analytic_ks)
        assert i_rp == 0.0 and i_rdp == 0.0
    for dt in (4100.0, 5000.0, 8000.0):  # region III
        i_rp, i_rdp = integrate_source(rect_kernel(dt), analytic_ks)
        assert i_rp == 0.0 and i_rdp == 0.0


def test_source_nonzero_in_region_II(analytic_ks):
    for dt in (1200.0, 2000.0, 3500.0):
        i_rp, i_rdp = integrate_source(rect_kernel(dt), analytic_ks)
        assert i_rp != 0.0 or i_rdp != 0.0


def test_vacuum_nonzero_all_regions(analytic_ks):
    for dt in (0.0, 2000.0, 5000.0):
        assert integrate_vacuum(rect_kernel(dt), analytic_ks) != 0.0


def test_null_kernel_gives_zero(analytic_ks):
    k = rect_kernel(2000.0, amplitude=0.0)
    assert integrate_vacuum(k, analytic_ks) == 0.0
    assert integrate_source(k, analytic_ks) == (0.0, 0.0)


def test_scale_covariance(analytic_ks):
    """Scaling both pulse amplitudes by lambda scales signals by lambda^2."""
    lam = 1.7
    base = rect_kernel(2000.0)
    scaled = rect_kernel(2000.0, amplitude=lam)
    for fn in (integrate_vacuum,):
        a = fn(base, analytic_ks)
        b = fn(scaled, analytic_ks)
        assert b == pytest.approx(lam**2 * a, rel=1e-12)
    ap = integrate_source(base, analytic_ks)
    bp = integrate_source(scaled, analytic_ks)
    assert bp[0] == pytest.approx(lam**2 * ap[0], rel=1e-12)
    assert bp[1] == pytest.approx(lam**2 * ap[1], rel=1e-12)


def test_exchange_symmetry(analytic_ks):
    """Pulse exchange (dr -> -dr, dt -> -dt): I_C and I_R' even, I_R'' odd."""
    k = rect_kernel(2000.0, dr=200.0)
    k_sw = k.swapped()
    ic_a = integrate_vacuum(k, analytic_ks)
    ic_b = integrate_vacuum(k_sw, analytic_ks)
    assert ic_b == pytest.approx(ic_a, rel=1e-10)
    rp_a, rdp_a = integrate_source(k, analytic_ks)
    rp_b, rdp_b = integrate_source(k_sw, analytic_ks)
    assert rp_b == pytest.approx(rp_a, rel=1e-10)
    assert rdp_b == pytest.approx(-rdp_a, rel=1e-10)


def test_exact_path_requires_rect(analytic_ks):
    p1 = PulseEnvelope("gauss", center_x=200.0, **PAPER)
    p2 = PulseEnvelope("gauss", **PAPER)
    with pytest.raises(ModeError):
        ExactRectEngine(overlap_kernel(p1, p2), analytic_ks)


def test_convergence_under_grid_doubling(analytic_ks):
    """Doubling quadrature orders moves paper-geometry results < 0.1%."""
    k = rect_kernel(2000.0)
    low = ExactRectEngine(k, analytic_ks,
                          QuadratureOptions(n_transverse=48, n_segment=32))
    high = ExactRectEngine(k, analytic_ks,
                           QuadratureOptions(n_transverse=96, n_segment=64))
    ic_l, ic_h = low.vacuum_integral(), high.vacuum_integral()
    assert abs(ic_h - ic_l) / abs(ic_h) < 1e-3
    (rp_l, rdp_l), (rp_h, rdp_h) = low.source_integrals(), high.source_integrals()
    assert abs(rp_h - rp_l) / abs(rp_h) < 1e-3
    assert abs(rdp_h - rdp_l) / abs(rdp_h) < 1e-3


def test_spectral_cross_check_against_exact(analytic_ks):
    """Frequency-domain engine agrees with the delta-collapse engine on a
    rectangular dispersionless geometry (band-truncation limited)."""
    par = dict(waist=6.0, duration=60.0, crystal_length=20.0,
               group_index=3.556)
    p1 = PulseEnvelope("rect", center_x=40.0, delay=420.0, **par)
    p2 = PulseEnvelope("rect", **par)
    k = overlap_kernel(p1, p2)
    eng = ExactRectEngine(k, analytic_ks,
                          QuadratureOptions(n_transverse=64, n_segment=48))
    ic_e = eng.vacuum_integral()
    irp_e, irdp_e = eng.source_integrals()
    ks = KernelSet(DISP, mode="spectral",
                   omega_max=units.thz_to_rad_fs(60.0), n_omega=4096,
                   window_fraction=0.3)
    engs = SpectralEngine(k, ks, QuadratureOptions(n_rho_x=24, n_rho_y=24,
                                                   n_rho_z=256))
    ic_s, irp_s, irdp_s = engs.evaluate(420.0)
    assert ic_s == pytest.approx(ic_e, rel=1e-2)
    assert irp_s == pytest.approx(irp_e, rel=3e-3)
    assert irdp_s == pytest.approx(irdp_e, rel=3e-3)


def test_oracle_equivalence_smooth_kernel():
    """Reduced overlap-kernel integral equals direct nested quadrature of
    the full double space-time integral for a smooth test kernel."""
    from oracles import (direct_nested_integral, reduced_integral,
                         small_rect_pair, smooth_test_kernel)

    p1, p2 = small_rect_pair()
    factors = smooth_test_kernel()
    reduced = reduced_integral(p1, p2, factors)
    direct = direct_nested_integral(p1, p2, factors)
    assert reduced == pytest.approx(direct, rel=1e-6)


def test_scan_records_and_regions():
    cfg = load_config("""
[experiment]
delta_r_um = 200.0
delta_t_scan = { start = 0.0, stop = 4800.0, step = 400.0 }
[crystal]
model = "dispersionless"
[pulses]
shape = "rect"
[angles]
theta1_rad = 1.5707963267948966
theta2_rad = 1.5707963267948966
""")
    recs = scan_delta_t(cfg)
    assert [r.delta_t for r in recs] == cfg.delta_t_values()
    assert all(r.status == "ok" for r in recs)
    for r in recs:
        # g_s = g_R' + g_R'' exactly, by construction
        assert r.g_s == r.g_r_prime + r.g_r_dprime
        # (pi/2, pi/2) assembles to the pure vacuum signal
        assert r.g_assembled == pytest.approx(r.g_vac, rel=1e-12)
        if r.region in ("I", "III"):
            assert r.g_s == 0.0
    assert {r.region for r in recs} == {"I", "II", "III"}


def test_scan_threads_deterministic():
    cfg = load_config("""
[experiment]
delta_r_um = 200.0
delta_t_scan = { start = 1000.0, stop = 3000.0, step = 500.0 }
[crystal]
model = "dispersionless"
[pulses]
shape = "rect"
""")
    seq = scan_delta_t(cfg, threads=1)
    par = scan_delta_t(cfg, threads=4)
    for a, b in zip(seq, par):
        assert a.delta_t == b.delta_t
        assert a.g_vac == b.g_vac
        assert a.g_s == b.g_s


def test_spectral_scan_gaussian_dispersive():
    cfg = load_config("""
[experiment]
delta_r_um = 200.0
delta_t_scan = { start = 1500.0, stop = 2500.0, step = 500.0 }
[crystal]
model = "lorentz"
[pulses]
shape = "gauss"
[numerics]
n_rho_x = 16
n_rho_y = 16
n_rho_z = 96
n_omega = 1024
""")
    recs = scan_delta_t(cfg)
    assert all(r.status == "ok" for r in recs)
    assert all(r.mode == "spectral" for r in recs)
    assert all(np.isfinite(r.g_vac) and np.isfinite(r.g_s) for r in recs)
    assert any(r.g_s != 0.0 for r in recs)
