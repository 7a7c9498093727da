"""INI run configuration with unit-suffixed keys.

Every key carries its unit in the name (``L1_m``, ``stress_Pa``); bare names
are dimensionless.  Sections map onto the library's config objects.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .beam_geometry import AlignmentGeometry
from .cavity_model import CavityConfig, ScanAxis, tune_max_coupling
from .noise_model import DetectionConfig, MembraneConfig


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


SCHEMA: dict[str, dict[str, type]] = {
    "cavity": {
        "R1": float, "R3": float, "R2": float, "membrane_index": float, "membrane_thickness_m": float,
        "membrane_loss": float, "L1_m": float, "L2_m": float, "dz_m_m": float, "dz_c_m": float,
        "gamma1": float, "gamma2": float, "wavelength_m": float, "laser_detuning_Hz": float,
        "tune_max_coupling": bool, "match_impedance": bool,
    },
    "membrane": {
        "stress_Pa": float, "density_kg_m3": float, "side_a_m": float, "side_b_m": float,
        "thickness_m": float, "damping_rad_s": float, "temperature_K": float,
    },
    "detection": {
        "g_el_V_Hz": float, "eta": float, "alpha_deg": float, "input_power_W": float,
        "detected_power_W": float, "responsivity_A_W": float, "electronic_floor_V2_Hz": float,
        "sampling_rate_Hz": float, "wavelength_m": float,
    },
    "alignment": {
        "d_m": float, "f_i_m": float, "wavelength_m": float, "waist_m": float,
        "dz_start_m": float, "dz_stop_m": float, "dz_points": int, "target_overlap": float,
    },
    "map": {
        "axis1_variable": str, "axis1_start": float, "axis1_stop": float, "axis1_points": int,
        "axis2_variable": str, "axis2_start": float, "axis2_stop": float, "axis2_points": int,
    },
    "scan": {
        "dz_c_start_m": float, "dz_c_stop_m": float, "points": int, "phi0_rad": float,
    },
    "spectrum": {
        "f_start_Hz": float, "f_stop_Hz": float, "points": int, "modes": str, "mode_coupling": str,
        "overlap": float, "duration_s": float, "frequency_noise_file": str,
        "chi_per_m": float, "chi_f_per_Hz": float, "highpass_Hz": float,
    },
}

_CONVERT = {float: float, int: int, str: str, bool: _bool}


@dataclass
class RunConfig:
    sections: dict[str, dict[str, object]] = field(default_factory=dict)
    base_dir: Path = field(default=Path("."), compare=False)

    def section(self, name: str) -> dict[str, object]:
        if name not in self.sections:
            raise ConfigError(f"missing [{name}] section")
        return self.sections[name]

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section: str, key: str):
        sec = self.section(section)
        if key not in sec:
            raise ConfigError(f"[{section}] needs {key}")
        return sec[key]


def parse_config(text: str, base_dir: Path = Path(".")) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    sections = {}
    for name in parser.sections():
        if name not in SCHEMA:
            raise ConfigError(f"unknown section [{name}]")
        values = {}
        for key, raw in parser.items(name):
            if key not in SCHEMA[name]:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            try:
                values[key] = _CONVERT[SCHEMA[name][key]](raw.strip())
            except ValueError as exc:
                raise ConfigError(f"[{name}] {key}: {exc}") from exc
        sections[name] = values
    return RunConfig(sections, base_dir)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text, path.parent)


def serialize_config(cfg: RunConfig) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    for name, values in cfg.sections.items():
        parser[name] = {k: repr(v) if isinstance(v, float) else str(v) for k, v in values.items()}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def cavity_config(cfg: RunConfig) -> CavityConfig:
    s = cfg.section("cavity")
    kwargs = {
        "R1": s.get("R1", 0.99), "R3": s.get("R3", 0.9995), "R2": s.get("R2"),
        "membrane_index": s.get("membrane_index"), "membrane_thickness": s.get("membrane_thickness_m"),
        "membrane_loss": s.get("membrane_loss"), "L1": s.get("L1_m", 0.01), "L2": s.get("L2_m", 0.02),
        "dz_m": s.get("dz_m_m", 0.0), "dz_c": s.get("dz_c_m", 0.0), "gamma1": s.get("gamma1", 1.0),
        "gamma2": s.get("gamma2", 1.0), "wavelength": s.get("wavelength_m", 795e-9),
        "laser_detuning": s.get("laser_detuning_Hz", 0.0),
    }
    try:
        c = CavityConfig(**kwargs)
        if s.get("tune_max_coupling", False) or s.get("match_impedance", False):
            tuned = tune_max_coupling(c, match_impedance=s.get("match_impedance", False))
            c = tuned.replace(dz_m=c.dz_m, dz_c=c.dz_c, laser_detuning=c.laser_detuning)
    except ValueError as exc:
        raise ConfigError(f"[cavity] {exc}") from exc
    return c


def membrane_config(cfg: RunConfig) -> MembraneConfig:
    s = cfg.section("membrane")
    d = MembraneConfig()
    try:
        return MembraneConfig(
            stress=s.get("stress_Pa", d.stress), density=s.get("density_kg_m3", d.density),
            side_a=s.get("side_a_m", d.side_a), side_b=s.get("side_b_m", d.side_b),
            thickness=s.get("thickness_m", d.thickness), damping=s.get("damping_rad_s", d.damping),
            temperature=s.get("temperature_K", d.temperature),
        )
    except ValueError as exc:
        raise ConfigError(f"[membrane] {exc}") from exc


def detection_config(cfg: RunConfig) -> DetectionConfig:
    s = cfg.section("detection")
    d = DetectionConfig()
    try:
        return DetectionConfig(
            g_el=s.get("g_el_V_Hz", d.g_el), alpha=np.deg2rad(s.get("alpha_deg", np.rad2deg(d.alpha))),
            input_power=s.get("input_power_W", d.input_power), wavelength=s.get("wavelength_m", d.wavelength),
            eta=s.get("eta"), responsivity=s.get("responsivity_A_W", d.responsivity),
            detected_power=s.get("detected_power_W"), electronic_floor=s.get("electronic_floor_V2_Hz", 0.0),
            sampling_rate=s.get("sampling_rate_Hz", d.sampling_rate),
        )
    except ValueError as exc:
        raise ConfigError(f"[detection] {exc}") from exc


def alignment_geometry(cfg: RunConfig) -> AlignmentGeometry:
    s = cfg.section("alignment")
    try:
        return AlignmentGeometry(
            d=s.get("d_m", 4e-3), f_i=s.get("f_i_m", 0.3), wavelength=s.get("wavelength_m", 795e-9),
            waist=s.get("waist_m", 0.7e-3),
        )
    except ValueError as exc:
        raise ConfigError(f"[alignment] {exc}") from exc


def map_axes(cfg: RunConfig) -> tuple[ScanAxis, ScanAxis]:
    axes = []
    for i in (1, 2):
        try:
            axes.append(ScanAxis(
                cfg.require("map", f"axis{i}_variable"), cfg.require("map", f"axis{i}_start"),
                cfg.require("map", f"axis{i}_stop"), cfg.require("map", f"axis{i}_points"),
            ))
        except ValueError as exc:
            raise ConfigError(f"[map] {exc}") from exc
    if axes[0].variable == axes[1].variable:
        raise ConfigError("[map] axes must scan different variables")
    return axes[0], axes[1]


def parse_modes(text: str) -> list[tuple[int, int]]:
    """``"1,1 1,2"`` -> ``[(1, 1), (1, 2)]``."""
    modes = []
    for token in text.split():
        try:
            m, n = (int(v) for v in token.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad mode {token!r}; expected m,n") from exc
        modes.append((m, n))
    if not modes:
        raise ConfigError("no membrane modes given")
    return modes
