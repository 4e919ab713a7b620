import json
from pathlib import Path

import pytest

from eossim.cli import main

SIGNAL_CFG = """
[experiment]
delta_r_um = 200.0
delta_t_scan = {{ start = 1000.0, stop = 3000.0, step = 500.0 }}

[crystal]
model = "dispersionless"

[pulses]
shape = "rect"

[output]
path = "{out}"
"""


def write_cfg(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_angles_subcommand(capsys):
    code = main(["angles", "--theta1", "1.5707963267948966",
                 "--theta2", "3.141592653589793"])
    out = capsys.readouterr().out
    assert code == 0
    assert "p_vac=" in out and "p_s_prime=1" in out and "p_s_dprime=1" in out


def test_missing_config_is_validation_error(tmp_path, capsys):
    code = main(["signal", "--config", str(tmp_path / "nope.toml")])
    err = capsys.readouterr().err
    assert code == 1
    assert "nope.toml" in err


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 64


def test_invalid_config_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "[experiment]\ndelta_r_um = -5.0\n")
    assert main(["signal", "--config", str(cfg)]) == 1


def test_signal_end_to_end(tmp_path):
    out = tmp_path / "out"
    cfg = write_cfg(tmp_path, SIGNAL_CFG.format(out=out))
    assert main(["signal", "--config", str(cfg)]) == 0
    csv = (out / "signal.csv").read_text().splitlines()
    assert csv[0] == "# manifest: manifest.json"
    assert csv[1].split(",")[:4] == ["delta_t_fs", "g_vac", "g_s", "g_r_prime"]
    assert len(csv) == 2 + 5
    assert (out / "signal.png").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "signal"
    assert manifest["config"]["delta_r_um"] == 200.0
    assert "manifest_hash" in manifest
    assert any(name.endswith("signal.csv") for name in manifest["outputs"])


def test_signal_determinism(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    cfg1 = write_cfg(tmp_path, SIGNAL_CFG.format(out=out1), "a.toml")
    cfg2 = write_cfg(tmp_path, SIGNAL_CFG.format(out=out2), "b.toml")
    assert main(["signal", "--config", str(cfg1)]) == 0
    assert main(["signal", "--config", str(cfg2)]) == 0
    assert (out1 / "signal.csv").read_bytes() == (out2 / "signal.csv").read_bytes()


def test_regions_subcommand(tmp_path):
    out = tmp_path / "r"
    cfg = write_cfg(tmp_path, SIGNAL_CFG.format(out=out))
    assert main(["regions", "--config", str(cfg),
                 "--delta-r", "0:400:41", "--delta-t", "0:5000:41"]) == 0
    lines = (out / "regions.csv").read_text().splitlines()
    assert lines[1] == "delta_r_um,delta_t_fs,label,margin_um"
    assert len(lines) == 2 + 41 * 41
    bl = (out / "region_boundaries.csv").read_text().splitlines()
    assert bl[1] == "delta_t_fs,delta_r_I_II_um,delta_r_II_III_um"
    assert (out / "regions.png").exists()


def test_kernels_subcommand(tmp_path):
    out = tmp_path / "k"
    cfg = write_cfg(tmp_path, SIGNAL_CFG.format(out=out))
    assert main(["kernels", "--config", str(cfg), "--rho-x", "200",
                 "--tau", "-3000:3000:65", "--overlap"]) == 0
    lines = (out / "kernels.csv").read_text().splitlines()
    assert lines[1].startswith("rho_x_um,rho_y_um,rho_z_um,tau_fs,c_value")
    assert len(lines) == 2 + 65
    assert (out / "overlap_kernel.csv").exists()


def test_fdt_subcommand_window_too_narrow(tmp_path, capsys):
    out = tmp_path / "f"
    # narrow window: |g_vac| still hot at the edges -> numeric failure
    cfg = write_cfg(tmp_path, """
[experiment]
delta_r_um = 0.0
delta_t_scan = { start = -350.0, stop = 350.0, step = 10.0 }

[crystal]
model = "lorentz"

[pulses]
shape = "gauss"

[numerics]
n_rho_x = 12
n_rho_y = 12
n_rho_z = 64
n_omega = 512

[output]
path = "%s"
""" % out)
    code = main(["fdt", "--config", str(cfg)])
    assert code == 2
    assert "window" in capsys.readouterr().err.lower()


def test_fdt_subcommand_success(tmp_path):
    out = tmp_path / "f2"
    cfg = write_cfg(tmp_path, """
[experiment]
delta_r_um = 0.0
delta_t_scan = { start = -9000.0, stop = 9000.0, step = 50.0 }

[crystal]
model = "lorentz"

[pulses]
shape = "gauss"

[numerics]
n_rho_x = 12
n_rho_y = 12
n_rho_z = 64
n_omega = 512

[output]
path = "%s"
""" % out)
    assert main(["fdt", "--config", str(cfg)]) == 0
    summary = json.loads((out / "fdt_summary.json").read_text())
    assert summary["l2_rel_residual"] < 0.10
    lines = (out / "fdt.csv").read_text().splitlines()
    assert lines[1] == ("delta_t_fs,g_vac,two_g_r_dprime,hilbert_prediction,"
                       "pointwise_residual")
    assert (out / "fdt.png").exists()
