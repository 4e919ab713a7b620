"""Command-line front end: signal, regions, fdt, kernels, angles.

Each data-producing subcommand loads a TOML config, runs the
computation, and writes manifest-stamped CSV files plus rendered PNG
figures into the output directory.  Exit codes: 0 success, 1 validation
error, 2 numeric failure (partial outputs are marked), 64 usage.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import config as config_mod
from . import fdt as fdt_mod
from . import integrator as integrator_mod
from . import medium as medium_mod
from . import regions as regions_mod
from . import report
from .medium import MediumError
from .waveplate import WavePlateDomainError, coefficients

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
EXIT_USAGE = 64


class _Run:
    """Collects outputs and writes the manifest at the end."""

    def __init__(self, command, cfg, outdir):
        self.command = command
        self.cfg = cfg
        self.outdir = Path(outdir if outdir else cfg.output.path)
        self.outputs = []
        self.t0 = report.timer()

    def path(self, name):
        return self.outdir / name

    def add(self, path):
        if path is not None:
            self.outputs.append(path)
        return path

    def finish(self, numerics_used=None):
        report.write_manifest(
            self.outdir, self.command, config_mod.config_to_dict(self.cfg),
            numerics_used or {}, self.outputs, report.timer() - self.t0,
        )


def _load(config_path):
    p = Path(config_path)
    if not p.exists():
        raise config_mod.ConfigError(f"config file not found: {p}")
    return config_mod.load_config(p)


@click.group()
@click.option("--verbose", is_flag=True, help="Chat while working.")
@click.pass_context
def cli(ctx, verbose):
    """Two-beam electro-optic sampling simulator."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "outdir", default=None, help="Output directory.")
@click.option("--threads", default=1, show_default=True)
@click.option("--plots/--no-plots", default=True, show_default=True)
@click.pass_context
def signal(ctx, config_path, outdir, threads, plots):
    """Delay scan of all signal contributions."""
    cfg = _load(config_path)
    run = _Run("signal", cfg, outdir)
    records = integrator_mod.scan_delta_t(cfg, threads=threads)
    rows = [
        (r.delta_t, r.g_vac, r.g_s, r.g_r_prime, r.g_r_dprime,
         r.g_assembled, r.region, r.status)
        for r in records
    ]
    run.add(report.write_csv(
        run.path("signal.csv"),
        ["delta_t_fs", "g_vac", "g_s", "g_r_prime", "g_r_dprime",
         "g_assembled", "region", "status"],
        rows,
    ))
    if plots:
        run.add(report.render_signal_figure(records, run.path("signal.png")))
    run.finish(records[0].metadata if records else {})
    failed = [r for r in records if r.status != "ok"]
    if ctx.obj["verbose"]:
        click.echo(f"wrote {len(records)} points ({len(failed)} failed) "
                   f"to {run.outdir}")
    if failed:
        raise _NumericFailure(f"{len(failed)} scan point(s) failed")


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "outdir", default=None)
@click.option("--delta-r", "dr_spec", default="0:400:101",
              show_default=True, help="delta_r grid start:stop:count (um).")
@click.option("--delta-t", "dt_spec", default="0:5000:101",
              show_default=True, help="delta_t grid start:stop:count (fs).")
@click.option("--plots/--no-plots", default=True, show_default=True)
def regions(config_path, outdir, dr_spec, dt_spec, plots):
    """Light-cone region map and analytic boundary curves."""
    cfg = _load(config_path)
    run = _Run("regions", cfg, outdir)
    dr = _parse_grid(dr_spec)
    dt = _parse_grid(dt_spec)
    med = config_mod.build_medium(cfg)
    p1, p2 = config_mod.build_pulses(cfg, delta_t=0.0)
    labels, margins, curves = regions_mod.region_map(p1, p2, med, dr, dt)
    rows = []
    for i, r in enumerate(dr):
        for j, t in enumerate(dt):
            rows.append((r, t, labels[i, j], margins[i, j]))
    run.add(report.write_csv(
        run.path("regions.csv"),
        ["delta_r_um", "delta_t_fs", "label", "margin_um"], rows,
    ))
    run.add(report.write_csv(
        run.path("region_boundaries.csv"),
        ["delta_t_fs", "delta_r_I_II_um", "delta_r_II_III_um"],
        zip(curves["delta_t_fs"], curves["delta_r_I_II_um"],
            curves["delta_r_II_III_um"]),
    ))
    if plots:
        run.add(report.render_region_figure(dr, dt, labels, curves,
                                            run.path("regions.png")))
    run.finish({"classifier_phase_index": medium_mod.phase_index_dc(med)})


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "outdir", default=None)
@click.option("--threads", default=1, show_default=True)
@click.option("--plots/--no-plots", default=True, show_default=True)
def fdt(config_path, outdir, threads, plots):
    """Signal-level fluctuation-dissipation check on a delay scan."""
    cfg = _load(config_path)
    if cfg.delta_t_scan is None:
        raise config_mod.ConfigError(
            "fdt needs [experiment] delta_t_scan = {start, stop, step}"
        )
    run = _Run("fdt", cfg, outdir)
    records = integrator_mod.scan_delta_t(cfg, threads=threads)
    try:
        rep = fdt_mod.verify_fdt_signal(records)
    except (fdt_mod.WindowError, fdt_mod.GridError) as exc:
        run.finish({})
        raise _NumericFailure(str(exc)) from exc
    rows = zip(rep.delta_t, rep.g_vac, 2.0 * rep.g_r_dprime,
               rep.hilbert_prediction, rep.residual)
    run.add(report.write_csv(
        run.path("fdt.csv"),
        ["delta_t_fs", "g_vac", "two_g_r_dprime", "hilbert_prediction",
         "pointwise_residual"],
        rows,
    ))
    summary = {
        "max_rel_residual": rep.max_rel_residual,
        "l2_rel_residual": rep.l2_rel_residual,
        "edge_ratio": rep.edge_ratio,
        "tail_estimate": rep.tail_estimate,
        "window": rep.metadata,
        "interior": [int(rep.interior.start), int(rep.interior.stop)],
    }
    run.add(report.write_json(run.path("fdt_summary.json"), summary))
    if plots:
        run.add(report.render_fdt_figure(rep, run.path("fdt.png")))
    run.finish(records[0].metadata if records else {})
    click.echo(f"FDT interior L2 residual: {rep.l2_rel_residual:.3%}")


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "outdir", default=None)
@click.option("--rho-x", default="200", show_default=True,
              help="Value or start:stop:count (um).")
@click.option("--rho-y", default="0", show_default=True)
@click.option("--rho-z", default="0", show_default=True)
@click.option("--tau", default="-4000:4000:257", show_default=True)
@click.option("--overlap", is_flag=True, help="Dump the overlap kernel too.")
@click.option("--plots/--no-plots", default=True, show_default=True)
def kernels(config_path, outdir, rho_x, rho_y, rho_z, tau, overlap, plots):
    """Dump C, R', R'' (and optionally K12) on a user grid."""
    cfg = _load(config_path)
    run = _Run("kernels", cfg, outdir)
    med = config_mod.build_medium(cfg)
    ks = integrator_mod.kernel_set_for(cfg, med)
    rx, ry, rz, tt = (_parse_grid(s) for s in (rho_x, rho_y, rho_z, tau))
    grid = np.stack(np.meshgrid(rx, ry, rz, tt, indexing="ij"), axis=-1)
    pts = grid.reshape(-1, 4)
    rows = []
    r_prime, r_dprime = ks.split_response()
    for (x, y, z, t) in pts:
        try:
            c = ks.correlation_time(x, y, z, t)
            rp = r_prime(x, y, z, t)
            rdp = r_dprime(x, y, z, t)
            rows.append((x, y, z, t, c, rp, rdp, "ok"))
        except ValueError as exc:
            rows.append((x, y, z, t, None, None, None,
                         f"failed: {type(exc).__name__}"))
    run.add(report.write_csv(
        run.path("kernels.csv"),
        ["rho_x_um", "rho_y_um", "rho_z_um", "tau_fs",
         "c_value", "r_prime_value", "r_dprime_value", "status"],
        rows,
    ))
    if overlap:
        p1, p2 = config_mod.build_pulses(cfg)
        k12 = integrator_mod.OverlapKernel(
            shape=cfg.pulses.shape, waist=cfg.pulses.waist_um,
            duration=cfg.pulses.duration_fs, crystal_length=cfg.crystal.L_um,
            beta=p1.beta, dx=cfg.delta_r_um, dy=0.0,
            dt=cfg.delta_t_fs or 0.0)
        krows = [(x, y, z, t, k12(x, y, z, t)) for (x, y, z, t) in pts]
        run.add(report.write_csv(
            run.path("overlap_kernel.csv"),
            ["rho_x_um", "rho_y_um", "rho_z_um", "tau_fs", "k12"], krows,
        ))
    if plots and len(rx) == 1 and len(ry) == 1 and len(rz) == 1:
        ok_rows = [r for r in rows if r[7] == "ok"]
        tt_ok = [r[3] for r in ok_rows]
        run.add(report.render_kernel_figure(
            tt_ok, [[r[4] for r in ok_rows], [r[5] for r in ok_rows],
                    [r[6] for r in ok_rows]],
            ["C", "R'", "R''"], run.path("kernels.png")))
    run.finish({"mode": ks.mode})


@cli.command()
@click.option("--theta1", required=True, type=float, help="Wave-plate angle 1 (rad).")
@click.option("--theta2", required=True, type=float, help="Wave-plate angle 2 (rad).")
def angles(theta1, theta2):
    """Print the wave-plate coefficient triple."""
    c = coefficients(theta1, theta2)
    click.echo(f"p_vac={report.fmt(c.p_vac)} "
               f"p_s_prime={report.fmt(c.p_s_prime)} "
               f"p_s_dprime={report.fmt(c.p_s_dprime)}")


def _parse_grid(spec):
    """'v' -> [v]; 'start:stop:count' -> linspace."""
    parts = str(spec).split(":")
    if len(parts) == 1:
        return np.array([float(parts[0])])
    if len(parts) != 3:
        raise click.UsageError(f"grid spec must be value or start:stop:count, got {spec!r}")
    return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))


class _NumericFailure(RuntimeError):
    pass


def main(argv=None):
    """Entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        click.echo(cli.get_help(click.Context(cli)), err=True)
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except (config_mod.ConfigError, MediumError, WavePlateDomainError) as exc:
        click.echo(f"validation error: {exc}", err=True)
        return EXIT_VALIDATION
    except (_NumericFailure, fdt_mod.WindowError, fdt_mod.GridError,
            integrator_mod.ConvergenceError) as exc:
        click.echo(f"numeric failure: {exc}", err=True)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
