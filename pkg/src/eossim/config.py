"""Experiment configuration: TOML grammar, validation, and builders.

The config document is TOML with the sections

    [experiment]  delta_r_um, delta_t_fs | delta_t_scan = {start, stop, step}
    [crystal]     model = "dispersionless" | "lorentz" | "table",
                  n, n_g, L_um, table_path,
                  eps_inf, omega_to_THz, omega_lo_THz, gamma_THz
    [pulses]      shape = "rect" | "gauss", waist_um, duration_fs
    [angles]      theta1_rad, theta2_rad          (optional section)
    [numerics]    omega_max_THz, n_omega, rho_cutoff_um, tau_pad_fs,
                  tolerance, window_fraction, n_rho_x, n_rho_y, n_rho_z,
                  n_exact_transverse, n_exact_segment
    [output]      path, format = "csv" | "json"

All lengths are micrometers, times femtoseconds, frequencies THz; this
is the complete SI <-> internal mapping.  Every default that fills a
missing key is recorded in the returned config's defaults_applied, and
validation failures are reported as structured diagnostics rather than
bare exceptions.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import medium as medium_mod
from . import pulses as pulses_mod
from . import units


class ConfigError(ValueError):
    """Malformed or invalid configuration document."""


@dataclass(frozen=True)
class Diagnostic:
    """One validation failure: key path, observed value, constraint."""

    key: str
    value: object
    constraint: str

    def __str__(self):
        return f"{self.key} = {self.value!r}: {self.constraint}"


@dataclass(frozen=True)
class ScanRange:
    start: float
    stop: float
    step: float

    def values(self):
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(max(n, 0))]


@dataclass(frozen=True)
class CrystalConfig:
    model: str = "dispersionless"
    n: float = 3.33
    n_g: float = 3.556
    L_um: float = 100.0
    table_path: str = None
    eps_inf: float = medium_mod.GAP_LORENTZ["eps_inf"]
    omega_to_THz: float = medium_mod.GAP_LORENTZ["omega_to_thz"]
    omega_lo_THz: float = medium_mod.GAP_LORENTZ["omega_lo_thz"]
    gamma_THz: float = medium_mod.GAP_LORENTZ["gamma_thz"]


@dataclass(frozen=True)
class PulseConfig:
    shape: str = "rect"
    waist_um: float = 10.0
    duration_fs: float = 185.0


@dataclass(frozen=True)
class AnglesConfig:
    theta1_rad: float
    theta2_rad: float


@dataclass(frozen=True)
class NumericsConfig:
    omega_max_THz: float = 15.0
    n_omega: int = 2048
    rho_cutoff_um: float = None      # default w/100, resolved at build time
    tau_pad_fs: float = 0.0
    tolerance: float = 1.0e-8
    window_fraction: float = 0.2
    n_rho_x: int = 32
    n_rho_y: int = 32
    n_rho_z: int = 192
    n_exact_transverse: int = 48
    n_exact_segment: int = 32


@dataclass(frozen=True)
class OutputConfig:
    path: str = "out"
    format: str = "csv"


@dataclass(frozen=True)
class ExperimentConfig:
    delta_r_um: float
    delta_t_fs: float = None
    delta_t_scan: ScanRange = None
    crystal: CrystalConfig = field(default_factory=CrystalConfig)
    pulses: PulseConfig = field(default_factory=PulseConfig)
    angles: AnglesConfig = None
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    defaults_applied: tuple = ()

    def delta_t_values(self):
        if self.delta_t_scan is not None:
            return self.delta_t_scan.values()
        return [self.delta_t_fs if self.delta_t_fs is not None else 0.0]

    @property
    def rho_cutoff_um(self):
        if self.numerics.rho_cutoff_um is not None:
            return self.numerics.rho_cutoff_um
        return self.pulses.waist_um / 100.0


_SECTION_FIELDS = {
    "experiment": ("delta_r_um", "delta_t_fs", "delta_t_scan"),
    "crystal": tuple(CrystalConfig.__dataclass_fields__),
    "pulses": tuple(PulseConfig.__dataclass_fields__),
    "angles": tuple(AnglesConfig.__dataclass_fields__),
    "numerics": tuple(NumericsConfig.__dataclass_fields__),
    "output": tuple(OutputConfig.__dataclass_fields__),
}

_INT_FIELDS = {"n_omega", "n_rho_x", "n_rho_y", "n_rho_z",
               "n_exact_transverse", "n_exact_segment"}


def _build_section(cls, data, section, defaults_out):
    kwargs = {}
    for name, fld in cls.__dataclass_fields__.items():
        if name in data:
            kwargs[name] = data[name]
        elif fld.default is not None:
            defaults_out.append(f"{section}.{name}={fld.default}")
    return cls(**kwargs)


def load_config(text):
    """Parse a TOML config document (text, file object, or path).

    Returns a fully validated ExperimentConfig with every applied default
    recorded; raises ConfigError on parse failures or invariant
    violations (the message lists each diagnostic).
    """
    if isinstance(text, Path):
        text = text.read_text(encoding="utf-8")
    elif hasattr(text, "read"):
        text = text.read()
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    unknown = set(raw) - set(_SECTION_FIELDS)
    if unknown:
        raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
    for section, keys in _SECTION_FIELDS.items():
        extra = set(raw.get(section, {})) - set(keys)
        if extra:
            raise ConfigError(
                f"unknown key(s) in [{section}]: {sorted(extra)}"
            )

    defaults = []
    exp = raw.get("experiment", {})
    if "delta_r_um" not in exp:
        raise ConfigError("missing required key experiment.delta_r_um")
    scan = None
    if "delta_t_scan" in exp:
        s = exp["delta_t_scan"]
        missing = {"start", "stop", "step"} - set(s)
        if missing:
            raise ConfigError(
                f"experiment.delta_t_scan needs start/stop/step, missing {sorted(missing)}"
            )
        scan = ScanRange(float(s["start"]), float(s["stop"]), float(s["step"]))
    delta_t = exp.get("delta_t_fs")
    if delta_t is None and scan is None:
        defaults.append("experiment.delta_t_fs=0.0")
        delta_t = 0.0

    crystal = _build_section(CrystalConfig, raw.get("crystal", {}), "crystal", defaults)
    pulses = _build_section(PulseConfig, raw.get("pulses", {}), "pulses", defaults)
    numerics_data = dict(raw.get("numerics", {}))
    for key in _INT_FIELDS & set(numerics_data):
        numerics_data[key] = int(numerics_data[key])
    numerics = _build_section(NumericsConfig, numerics_data, "numerics", defaults)
    output = _build_section(OutputConfig, raw.get("output", {}), "output", defaults)
    angles = None
    if "angles" in raw:
        a = raw["angles"]
        missing = {"theta1_rad", "theta2_rad"} - set(a)
        if missing:
            raise ConfigError(f"[angles] needs both angles, missing {sorted(missing)}")
        angles = AnglesConfig(float(a["theta1_rad"]), float(a["theta2_rad"]))

    cfg = ExperimentConfig(
        delta_r_um=float(exp["delta_r_um"]),
        delta_t_fs=float(delta_t) if delta_t is not None else None,
        delta_t_scan=scan,
        crystal=crystal,
        pulses=pulses,
        angles=angles,
        numerics=numerics,
        output=output,
        defaults_applied=tuple(defaults),
    )
    diags = validate_config(cfg)
    if diags:
        raise ConfigError(
            "invalid configuration:\n  " + "\n  ".join(str(d) for d in diags)
        )
    return cfg


def validate_config(cfg):
    """Structural invariants as a list of diagnostics (empty iff valid)."""
    diags = []

    def check(ok, key, value, constraint):
        if not ok:
            diags.append(Diagnostic(key, value, constraint))

    check(cfg.delta_r_um >= 0.0, "experiment.delta_r_um", cfg.delta_r_um, "must be >= 0")
    if cfg.delta_t_scan is not None:
        s = cfg.delta_t_scan
        check(s.step > 0.0, "experiment.delta_t_scan.step", s.step, "must be > 0")
        check(s.stop >= s.start, "experiment.delta_t_scan.stop", s.stop,
              "must be >= start")
    c = cfg.crystal
    check(c.model in ("dispersionless", "lorentz", "table"), "crystal.model",
          c.model, "must be dispersionless|lorentz|table")
    check(c.L_um > 0.0, "crystal.L_um", c.L_um, "must be > 0")
    check(c.n >= 1.0, "crystal.n", c.n, "must be >= 1")
    check(c.n_g >= 1.0, "crystal.n_g", c.n_g, "must be >= 1")
    if c.model == "lorentz":
        check(c.eps_inf > 0.0, "crystal.eps_inf", c.eps_inf, "must be > 0")
        check(0.0 < c.omega_to_THz <= c.omega_lo_THz, "crystal.omega_to_THz",
              c.omega_to_THz, "needs 0 < omega_TO <= omega_LO (passivity)")
        check(c.gamma_THz >= 0.0, "crystal.gamma_THz", c.gamma_THz, "must be >= 0")
    if c.model == "table":
        check(bool(c.table_path), "crystal.table_path", c.table_path,
              "required for the table model")
    p = cfg.pulses
    check(p.shape in ("rect", "gauss"), "pulses.shape", p.shape,
          "must be rect|gauss")
    check(p.waist_um > 0.0, "pulses.waist_um", p.waist_um, "must be > 0")
    check(p.duration_fs > 0.0, "pulses.duration_fs", p.duration_fs, "must be > 0")
    if cfg.angles is not None:
        for key, theta in (("angles.theta1_rad", cfg.angles.theta1_rad),
                           ("angles.theta2_rad", cfg.angles.theta2_rad)):
            reduced = theta % (2.0 * math.pi)
            check(math.cos(reduced) <= 1e-9, key, theta,
                  "outside [pi/2, 3*pi/2] (mod 2*pi): cos(theta) must be <= 0")
    n = cfg.numerics
    check(n.omega_max_THz > 0.0, "numerics.omega_max_THz", n.omega_max_THz,
          "must be > 0")
    check(n.n_omega >= 16, "numerics.n_omega", n.n_omega, "must be >= 16")
    check(n.tolerance > 0.0, "numerics.tolerance", n.tolerance, "must be > 0")
    check(0.0 <= n.window_fraction < 1.0, "numerics.window_fraction",
          n.window_fraction, "must be in [0, 1)")
    if n.rho_cutoff_um is not None:
        check(n.rho_cutoff_um > 0.0, "numerics.rho_cutoff_um", n.rho_cutoff_um,
              "must be > 0")
    for key in ("n_rho_x", "n_rho_y", "n_rho_z", "n_exact_transverse",
                "n_exact_segment"):
        check(getattr(n, key) >= 4, f"numerics.{key}", getattr(n, key),
              "must be >= 4")
    o = cfg.output
    check(o.format in ("csv", "json"), "output.format", o.format,
          "must be csv|json")
    return diags


def serialize_config(cfg):
    """Emit the config back as TOML; load_config(serialize_config(c)) == c."""
    out = io.StringIO()
    out.write("[experiment]\n")
    out.write(f"delta_r_um = {cfg.delta_r_um!r}\n")
    if cfg.delta_t_scan is not None:
        s = cfg.delta_t_scan
        out.write("delta_t_scan = { start = %r, stop = %r, step = %r }\n"
                  % (s.start, s.stop, s.step))
    elif cfg.delta_t_fs is not None:
        out.write(f"delta_t_fs = {cfg.delta_t_fs!r}\n")

    def emit(section, obj):
        out.write(f"\n[{section}]\n")
        for key, val in asdict(obj).items():
            if val is None:
                continue
            if isinstance(val, str):
                out.write(f'{key} = "{val}"\n')
            elif isinstance(val, bool):
                out.write(f"{key} = {str(val).lower()}\n")
            else:
                out.write(f"{key} = {val!r}\n")

    emit("crystal", cfg.crystal)
    emit("pulses", cfg.pulses)
    if cfg.angles is not None:
        emit("angles", cfg.angles)
    emit("numerics", cfg.numerics)
    emit("output", cfg.output)
    return out.getvalue()


def config_to_dict(cfg):
    """Plain-dict snapshot (for manifests)."""
    d = asdict(cfg)
    d["defaults_applied"] = list(cfg.defaults_applied)
    return d


def build_medium(cfg):
    """Medium object from the crystal section."""
    c = cfg.crystal
    if c.model == "dispersionless":
        return medium_mod.Dispersionless(n=c.n, n_g=c.n_g)
    if c.model == "lorentz":
        return medium_mod.Lorentz(
            eps_inf=c.eps_inf,
            omega_to=units.thz_to_rad_fs(c.omega_to_THz),
            omega_lo=units.thz_to_rad_fs(c.omega_lo_THz),
            gamma=units.thz_to_rad_fs(c.gamma_THz),
            n_g=c.n_g,
        )
    if c.model == "table":
        return medium_mod.load_permittivity_table(c.table_path, n_g=c.n_g)
    raise ConfigError(f"unknown crystal model {c.model!r}")


def build_pulses(cfg, delta_t=None):
    """Pulse pair: pulse 1 offset by delta_r along x and delayed by delta_t."""
    dt = cfg.delta_t_fs if delta_t is None else delta_t
    common = dict(
        shape=cfg.pulses.shape,
        waist=cfg.pulses.waist_um,
        duration=cfg.pulses.duration_fs,
        crystal_length=cfg.crystal.L_um,
        group_index=cfg.crystal.n_g,
    )
    p1 = pulses_mod.PulseEnvelope(center_x=cfg.delta_r_um, delay=dt or 0.0, **common)
    p2 = pulses_mod.PulseEnvelope(**common)
    return p1, p2
