"""Reproducible outputs: delimited files, run manifests, and figures.

Every CSV starts with a `# manifest: <name>` comment tying it to the run
manifest, followed by a header row.  Reruns with identical configs
produce byte-identical delimited files: floats are formatted with a
fixed %.12g, row order is fixed, and nothing time-dependent enters the
data files (wall-clock lives only in the manifest).  Figures are
rendered alongside as PNG; the CSVs stay the source of truth.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__

MANIFEST_NAME = "manifest.json"


def fmt(value):
    """Fixed deterministic formatting for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, float):
        if value != value:  # nan marks a failed point; cell stays empty
            return ""
        return "%.12g" % (value + 0.0)  # normalizes -0.0
    return str(value)


def write_csv(path, header, rows, manifest_name=MANIFEST_NAME):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# manifest: {manifest_name}", ",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8", newline="\n")
    return path


def manifest_hash(config_dict, command):
    """Stable identity of a run: config snapshot + command, no clocks."""
    blob = json.dumps({"config": config_dict, "command": command},
                      sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def write_manifest(outdir, command, config_dict, numerics_used, outputs,
                   wall_clock_s):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    payload = {
        "tool": "eossim",
        "version": __version__,
        "command": command,
        "config": config_dict,
        "numerics_used": numerics_used,
        "outputs": [str(o) for o in outputs],
        "wall_clock_s": round(wall_clock_s, 3),
        "manifest_hash": manifest_hash(config_dict, command),
    }
    path = outdir / MANIFEST_NAME
    write_json(path, payload)
    return path


def timer():
    return time.perf_counter()


# --- figures ---------------------------------------------------------------

def render_signal_figure(records, path):
    """Contributions vs delay, linear and log-magnitude panels."""
    ok = [r for r in records if r.status == "ok"]
    if not ok:
        return None
    t = np.array([r.delta_t for r in ok]) * 1e-3
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    series = [("g_vac", "tab:red"), ("g_s", "tab:green")]
    if any(r.g_assembled is not None for r in ok):
        series.append(("g_assembled", "tab:blue"))
    for name, color in series:
        y = np.array([getattr(r, name) for r in ok], dtype=float)
        ax1.plot(t, y, color=color, label=name)
        ax2.semilogy(t, np.abs(y), color=color, label=f"|{name}|")
    ax1.axhline(0.0, color="0.8", lw=0.8)
    ax1.set_ylabel("signal (arb. units)")
    ax1.legend(frameon=False)
    ax2.set_xlabel("delay $\\delta t$ (ps)")
    ax2.set_ylabel("|signal| (arb. units)")
    ax2.legend(frameon=False)
    for r0, r1, lab in _region_bands(ok):
        ax1.axvspan(r0 * 1e-3, r1 * 1e-3, alpha=0.08, color="gray")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _region_bands(records):
    bands = []
    start = None
    for i, r in enumerate(records):
        if r.region == "II" and start is None:
            start = r.delta_t
        if r.region != "II" and start is not None:
            bands.append((start, records[i - 1].delta_t, "II"))
            start = None
    if start is not None:
        bands.append((start, records[-1].delta_t, "II"))
    return bands


def render_region_figure(delta_r, delta_t, labels, curves, path):
    code = np.zeros(labels.shape)
    code[labels == "II"] = 1.0
    code[labels == "III"] = 2.0
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.pcolormesh(np.asarray(delta_t) * 1e-3, delta_r, code,
                  cmap="Pastel1", shading="nearest")
    dt = curves["delta_t_fs"] * 1e-3
    ax.plot(dt, curves["delta_r_I_II_um"], "k-", lw=1.5, label="I/II boundary")
    ax.plot(dt, curves["delta_r_II_III_um"], "k--", lw=1.5, label="II/III boundary")
    ax.set_xlabel("delay $\\delta t$ (ps)")
    ax.set_ylabel("separation $\\delta r$ (um)")
    ax.set_ylim(min(delta_r), max(delta_r))
    ax.legend(frameon=False, loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_fdt_figure(rep, path):
    t = rep.delta_t * 1e-3
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(t, rep.g_vac, "g--", label="g_vac")
    ax1.plot(t, rep.hilbert_prediction, "r-",
             label="Hilbert transform of 2 g_R''")
    ax1.plot(t, 2.0 * rep.g_r_dprime, "0.6", lw=0.8, label="2 g_R''")
    ax1.set_ylabel("signal (arb. units)")
    ax1.legend(frameon=False)
    ax2.plot(t, rep.residual, "k-", lw=0.9)
    ax2.axvspan(t[0], t[rep.interior.start], color="0.9")
    ax2.axvspan(t[rep.interior.stop - 1], t[-1], color="0.9")
    ax2.set_xlabel("delay $\\delta t$ (ps)")
    ax2.set_ylabel("residual")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_kernel_figure(tau, values, labels_, path, xlabel="tau (fs)"):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for v, lab in zip(values, labels_):
        ax.plot(tau, v, label=lab)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("kernel value")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
