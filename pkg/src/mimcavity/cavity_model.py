"""Front mirror / membrane / back mirror cavity: scans, resonances and slopes.

Geometry: the front sub-cavity has length ``L1 - dz_m`` and the back one
``L2 + dz_m + dz_c``.  A positive membrane displacement therefore moves the
membrane towards the front mirror.  With this convention the on-resonance
response to the membrane is ``d rho_1 / d dz_m = -i |chi|``; the frequency
response keeps the sign ``d rho_1 / d f = i chi_f`` with ``chi_f < 0``.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .optics_core import (
    MEMBRANE_ABSORPTION,
    OpticalElement,
    PropagationSegment,
    chain_reflectance,
    element_from_powers,
    membrane_element,
)

SCAN_VARIABLES = ("dz_m", "dz_c", "laser_detuning")


@dataclass(frozen=True)
class CavityConfig:
    """Three-element cavity.  Lengths in metres, reflectances as powers.

    The membrane is given either by ``R2`` directly (lossless unless
    ``membrane_loss`` is set) or by ``membrane_index``/``membrane_thickness``,
    in which case the thin-slab reflectance and the default absorption apply.
    """

    R1: float = 0.99
    R3: float = 0.9995
    R2: Optional[float] = None
    membrane_index: Optional[float] = None
    membrane_thickness: Optional[float] = None
    membrane_loss: Optional[float] = None
    L1: float = 0.01
    L2: float = 0.02
    dz_m: float = 0.0
    dz_c: float = 0.0
    gamma1: float = 1.0
    gamma2: float = 1.0
    wavelength: float = 795e-9
    laser_detuning: float = 0.0

    def __post_init__(self):
        if self.R2 is None and (self.membrane_index is None or self.membrane_thickness is None):
            raise ValueError("give either R2 or membrane_index and membrane_thickness")
        if not (0 < self.gamma1 <= 1 and 0 < self.gamma2 <= 1):
            raise ValueError("loss factors must lie in (0, 1]")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if np.any(np.asarray(self.front_length) <= 0) or np.any(np.asarray(self.back_length) <= 0):
            raise ValueError("sub-cavity lengths must stay positive")

    @property
    def front_length(self):
        return self.L1 - self.dz_m

    @property
    def back_length(self):
        return self.L2 + self.dz_m + self.dz_c

    @property
    def k(self):
        return 2 * np.pi * (SPEED_OF_LIGHT / self.wavelength + self.laser_detuning) / SPEED_OF_LIGHT

    def membrane(self) -> OpticalElement:
        if self.R2 is not None:
            return element_from_powers(self.R2, self.membrane_loss or 0.0)
        loss = MEMBRANE_ABSORPTION if self.membrane_loss is None else self.membrane_loss
        return membrane_element(self.membrane_index, self.membrane_thickness, self.wavelength, loss)

    def elements(self) -> list[OpticalElement]:
        return [element_from_powers(self.R1), self.membrane(), element_from_powers(self.R3)]

    def amplitudes(self) -> tuple[float, float, float]:
        return tuple(el.r for el in self.elements())

    def replace(self, **changes) -> "CavityConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ScanAxis:
    variable: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.variable not in SCAN_VARIABLES:
            raise ValueError(f"unknown scan variable {self.variable!r}; expected one of {SCAN_VARIABLES}")
        if self.points < 1:
            raise ValueError("a scan needs at least one point")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ResonanceInfo:
    position: float
    linewidth: float
    depth: float


def total_reflectance(config: CavityConfig):
    """Complex reflection coefficient rho_1 of the whole system.

    Any of ``dz_m``, ``dz_c`` or ``laser_detuning`` may be numpy arrays.
    """
    segments = [
        PropagationSegment(config.front_length, config.gamma1),
        PropagationSegment(config.back_length, config.gamma2),
    ]
    return chain_reflectance(config.elements(), segments, config.k).rho


def reflectance_map(config: CavityConfig, axis1: ScanAxis, axis2: ScanAxis) -> np.ndarray:
    """|rho_1|^2 on a grid, indexed ``[i1, i2]`` (row-major in axis1)."""
    if axis1.variable == axis2.variable:
        raise ValueError("the two axes must scan different variables")
    v1, v2 = np.meshgrid(axis1.values(), axis2.values(), indexing="ij")
    scanned = config.replace(**{axis1.variable: v1, axis2.variable: v2})
    return np.abs(total_reflectance(scanned)) ** 2 * np.ones_like(v1)


def reflectance_scan(config: CavityConfig, axis: ScanAxis) -> np.ndarray:
    values = axis.values()
    return np.abs(total_reflectance(config.replace(**{axis.variable: values}))) ** 2 * np.ones_like(values)


def find_resonances(config: CavityConfig, scan: ScanAxis, threshold: float = 0.99) -> list[ResonanceInfo]:
    """Reflectance minima along ``scan`` with half-depth FWHM in scan units.

    Minima touching the scan ends are skipped since their width is undefined.
    The half-depth level uses the maximum reflectance of the scan as baseline.
    """
    x = scan.values()
    y = reflectance_scan(config, scan)
    if len(x) < 3:
        return []
    baseline = y.max()
    found = []
    interior = np.flatnonzero((y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:])) + 1
    for i in interior:
        if y[i] >= threshold:
            continue
        half = 0.5 * (baseline + y[i])
        left = i
        while left > 0 and y[left] < half:
            left -= 1
        right = i
        while right < len(y) - 1 and y[right] < half:
            right += 1
        if y[left] < half or y[right] < half:
            continue
        xl = np.interp(half, [y[left + 1], y[left]], [x[left + 1], x[left]])
        xr = np.interp(half, [y[right - 1], y[right]], [x[right - 1], x[right]])
        # refine the minimum with a parabola through the three lowest samples
        denom = y[i - 1] - 2 * y[i] + y[i + 1]
        shift = 0.5 * (y[i - 1] - y[i + 1]) / denom if denom > 0 else 0.0
        pos = x[i] + shift * (x[1] - x[0])
        found.append(ResonanceInfo(position=float(pos), linewidth=float(xr - xl), depth=float(y[i])))
    return sorted(found, key=lambda r: r.position)


def fsr(L_total: float) -> float:
    """Free spectral range c / 2L in Hz."""
    if L_total <= 0:
        raise ValueError("cavity length must be positive")
    return SPEED_OF_LIGHT / (2 * L_total)


def finesse_empty(R1: float, R3: float) -> float:
    """Finesse of the two-mirror cavity without membrane."""
    if not (0 < R1 < 1 and 0 < R3 < 1):
        raise ValueError("mirror reflectances must lie in (0, 1)")
    g = np.sqrt(R1 * R3)
    return float(np.pi * np.sqrt(g) / (1 - g))


def impedance_match_r1(r2: float, r3: float, gamma1: float) -> float:
    """Front-mirror amplitude reflectivity that nulls rho_1 at maximal coupling."""
    denom = r2 * r3 - 1
    if abs(denom) < 1e-15:
        raise ValueError("r2 * r3 = 1 has no impedance-matching solution")
    return gamma1 * (r2 - r3) / denom


def tune_max_coupling(config: CavityConfig, match_impedance: bool = False) -> CavityConfig:
    """Snap the lengths so the front sub-cavity is anti-resonant and the back one resonant.

    Displacements and detuning are reset to zero.  With ``match_impedance`` the
    front mirror is replaced by the impedance-matched one.  The match uses the
    exact membrane/back-mirror reflection, so it also holds for an absorbing
    membrane; for a lossless one it equals :func:`impedance_match_r1`.
    """
    lam = config.wavelength
    m = np.round((config.L1 - lam / 4) / (lam / 2))
    n = max(np.round(config.L2 / (lam / 2)), 1)
    tuned = config.replace(L1=lam / 4 + m * lam / 2, L2=n * lam / 2, dz_m=0.0, dz_c=0.0, laser_detuning=0.0)
    if match_impedance:
        back = chain_reflectance(tuned.elements()[1:], [PropagationSegment(tuned.back_length, tuned.gamma2)], tuned.k)
        # rho_1 vanishes for r1 = rho_2' = -gamma1 * rho_2 at the anti-resonant front length
        r1 = -tuned.gamma1 * back.rho.real
        if not 0 < r1 < 1:
            raise ValueError(f"no physical impedance match (r1 = {r1:.6g})")
        tuned = tuned.replace(R1=r1**2)
    return tuned


def max_coupling_offset(config: CavityConfig) -> float:
    """Distance (m) of the sub-cavity lengths from the maximal-coupling condition."""
    half = config.wavelength / 2

    def wrap(x):
        return abs((x + half / 2) % half - half / 2)

    return max(wrap(config.front_length - config.wavelength / 4), wrap(config.back_length))


def _check_operating_point(config: CavityConfig):
    if max_coupling_offset(config) > config.wavelength / 100:
        warnings.warn("configuration is more than lambda/100 away from maximal dispersive coupling", stacklevel=3)


@dataclass(frozen=True)
class DispersiveSlope:
    """Membrane response d rho_1 / d dz_m (1/m): finite difference plus closed forms.

    ``chi`` is the real coupling defined by ``d rho_1 / d dz_m = i chi``.
    """

    numeric: complex
    expansion: complex
    matched: complex
    lossless: complex

    @property
    def chi(self) -> float:
        return float((self.numeric / 1j).real)


def response_expansion(config: CavityConfig):
    """Zeroth- and first-order coefficients of rho_1 in dz_m at maximal coupling.

    Returns ``(rho0, slope)`` with rho_1 ~ rho0 + slope * dz_m.
    """
    r1, r2, r3 = config.amplitudes()
    g = config.gamma1
    lam = config.wavelength
    D = (r2 * r3 - 1) + r1 * g * (r3 - r2)
    rho0 = (r1 * (r2 * r3 - 1) + g * (r3 - r2)) / D
    slope = 4j * np.pi * (1 - r1**2) * r2 * g * (2 * r2 * r3 - 1 - r3**2) / (D**2 * lam)
    return rho0, slope


def dispersive_slope(config: CavityConfig, step: Optional[float] = None) -> DispersiveSlope:
    """Central finite difference of rho_1 over dz_m, step ``lambda * 1e-6`` by default."""
    _check_operating_point(config)
    lam = config.wavelength
    h = lam * 1e-6 if step is None else step
    up = total_reflectance(config.replace(dz_m=config.dz_m + h))
    down = total_reflectance(config.replace(dz_m=config.dz_m - h))
    numeric = complex((up - down) / (2 * h))

    r1, r2, _ = np.asarray(config.amplitudes(), dtype=float)
    g = np.float64(config.gamma1)
    _, expansion = response_expansion(config)
    # r3 -> 1 limits; diverge for gamma1 -> 1 or r1 -> 1, r2 -> 1
    with np.errstate(divide="ignore", invalid="ignore"):
        matched = g / (1 - g**2) * r2 / (1 - r2) * (-8j * np.pi / lam)
        lossless = (1 + r1) / (1 - r1) * r2 / (1 - r2) * (-8j * np.pi / lam)
    return DispersiveSlope(numeric=numeric, expansion=complex(expansion), matched=complex(matched),
                           lossless=complex(lossless))


@dataclass(frozen=True)
class FrequencySlope:
    """Laser-frequency response d rho_1 / d f (1/Hz); ``chi_f`` is its imaginary part."""

    numeric: complex
    closed_form: complex

    @property
    def chi_f(self) -> float:
        return float((self.numeric / 1j).real)


def frequency_response_closed_form(config: CavityConfig) -> complex:
    _, r2, _ = config.amplitudes()
    g = np.float64(config.gamma1)
    L1, L2 = config.front_length, config.back_length
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = ((1 - r2) * L1 + (1 + r2) * L2) / (1 - r2) * g / (1 - g**2)
    return complex(scale * (-4j * np.pi / SPEED_OF_LIGHT))


def frequency_response(config: CavityConfig, step: Optional[float] = None) -> FrequencySlope:
    """Central finite difference of rho_1 over laser frequency, default step FSR * 1e-6."""
    _check_operating_point(config)
    h = fsr(config.front_length + config.back_length) * 1e-6 if step is None else step
    up = total_reflectance(config.replace(laser_detuning=config.laser_detuning + h))
    down = total_reflectance(config.replace(laser_detuning=config.laser_detuning - h))
    return FrequencySlope(numeric=complex((up - down) / (2 * h)), closed_form=frequency_response_closed_form(config))
