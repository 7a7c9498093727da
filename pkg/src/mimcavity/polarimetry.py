"""Polarisation encoding of the cavity response and balanced detection.

Field amplitudes are scaled so that ``|a|**2`` is a photon flux (photons/s).
Stokes components are half the flux differences,

    S0 = (|aH|^2 + |aV|^2) / 2      Sx = (|aH|^2 - |aV|^2) / 2
    Sy = Re(aH* aV)                 Sz = Im(aH* aV)

so that ``Sz`` is half the left-minus-right circular flux with
``a_L,R = (aH -/+ i aV) / sqrt(2)``.  H is the reference beam, V the signal
beam entering the cavity.

Wave plates act on Jones vectors as ``R(-theta) diag(1, exp(i delta)) R(theta)``
which on the Poincare sphere is a right-handed rotation by ``delta`` about the
equatorial axis at azimuth ``2 theta``.  The detector pair behind the
polarising beam splitter measures the H/V imbalance ``Sx`` after the plates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import h as PLANCK

from .cavity_model import CavityConfig, total_reflectance


@dataclass(frozen=True)
class FieldPair:
    a_H: complex
    a_V: complex

    @classmethod
    def linear(cls, flux: float, alpha: float) -> "FieldPair":
        """Linearly polarised beam of total ``flux`` at angle ``alpha`` from H."""
        A = np.sqrt(flux)
        return cls(A * np.cos(alpha), A * np.sin(alpha))

    @property
    def flux(self):
        return np.abs(self.a_H) ** 2 + np.abs(self.a_V) ** 2

    def jones(self) -> np.ndarray:
        return np.array([self.a_H, self.a_V], dtype=complex)

    def swapped(self) -> "FieldPair":
        return FieldPair(self.a_V, self.a_H)


@dataclass(frozen=True)
class StokesVector:
    S0: float
    Sx: float
    Sy: float
    Sz: float

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.Sx, self.Sy, self.Sz], dtype=float)

    @property
    def degree_of_polarization(self) -> float:
        return float(np.linalg.norm(self.vector) / self.S0) if self.S0 else 0.0


@dataclass(frozen=True)
class WavePlate:
    kind: str  # "quarter" or "half"
    axis_angle: float  # fast axis from H, radians

    def __post_init__(self):
        if self.kind not in ("quarter", "half"):
            raise ValueError(f"unknown wave plate kind {self.kind!r}")
        object.__setattr__(self, "axis_angle", float(self.axis_angle % np.pi))

    @property
    def retardance(self) -> float:
        return np.pi / 2 if self.kind == "quarter" else np.pi

    def jones(self) -> np.ndarray:
        c, s = np.cos(self.axis_angle), np.sin(self.axis_angle)
        rot = np.array([[c, s], [-s, c]])
        return rot.T @ np.diag([1.0, np.exp(1j * self.retardance)]) @ rot

    def rotation(self) -> np.ndarray:
        """3x3 rotation acting on (Sx, Sy, Sz)."""
        two = 2 * self.axis_angle
        return _rotation_matrix(np.array([np.cos(two), np.sin(two), 0.0]), self.retardance)


def _rotation_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    n = axis / np.linalg.norm(axis)
    K = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


def stokes_from_fields(f: FieldPair) -> StokesVector:
    nH = np.abs(f.a_H) ** 2
    nV = np.abs(f.a_V) ** 2
    cross = np.conj(f.a_H) * f.a_V
    return StokesVector(0.5 * (nH + nV), 0.5 * (nH - nV), np.real(cross), np.imag(cross))


def converter_reflect(f_in: FieldPair, rho: complex) -> tuple[FieldPair, float]:
    """Reflect off the converter: H untouched, V scaled by the cavity's rho_1.

    Returns the outgoing fields and the flux lost in the cavity.
    """
    if np.any(np.abs(rho) > 1 + 1e-12):
        raise ValueError("|rho| exceeds 1; the converter is passive")
    out = FieldPair(f_in.a_H, rho * f_in.a_V)
    lost = (1 - np.abs(rho) ** 2) * np.abs(f_in.a_V) ** 2
    return out, lost


Polarization = Union[StokesVector, FieldPair]


def waveplate_apply(state: Polarization, plate: WavePlate) -> Polarization:
    if isinstance(state, FieldPair):
        a = plate.jones() @ state.jones()
        return FieldPair(a[0], a[1])
    v = plate.rotation() @ state.vector
    return StokesVector(state.S0, *v)


def compensation_matrix(qwp_angle: float, hwp_angle: float) -> np.ndarray:
    """Stokes rotation of the quarter-wave plate followed by the half-wave plate."""
    return WavePlate("half", hwp_angle).rotation() @ WavePlate("quarter", qwp_angle).rotation()


def detected_imbalance(s: StokesVector, qwp_angle: float, hwp_angle: float) -> float:
    """H/V imbalance (Sx) seen by the detector pair behind both plates."""
    return float((compensation_matrix(qwp_angle, hwp_angle) @ s.vector)[0])


def balance_compensation(mean_output: StokesVector, tol: float = 1e-12) -> tuple[float, float]:
    """Plate angles that null the mean imbalance and maximise the phase response.

    A relative phase between H and V rotates the Stokes vector about Sx, so the
    signal direction is ``x_hat cross s``.  The plates are chosen such that the
    detector projects onto exactly that direction.
    """
    s = mean_output.vector
    v = np.array([0.0, -s[2], s[1]])
    norm = np.linalg.norm(v)
    if norm <= tol * max(mean_output.S0, 1e-300):
        raise ValueError("no interference between H and V; the phase is not observable")
    u = v / norm
    if np.hypot(u[0], u[1]) < 1e-12:
        qwp = np.pi / 4
    else:
        qwp = 0.5 * np.arctan2(u[1], u[0])
    e = WavePlate("quarter", qwp).rotation() @ u
    hwp = 0.25 * np.arctan2(e[1], e[0])
    return float(qwp % np.pi), float(hwp % np.pi)


@dataclass
class LockScan:
    dz_c: np.ndarray
    total_power: np.ndarray  # W
    error_signal: np.ndarray  # gain * photons/s
    qwp_angle: float
    hwp_angle: float


def photon_flux(power: float, wavelength: float) -> float:
    return power * wavelength / (PLANCK * SPEED_OF_LIGHT)


def lock_scan(
    config: CavityConfig,
    alpha: float,
    dz_c,
    input_power: float = 1.0,
    phi0: float = 0.0,
    gain: float = 1.0,
    efficiency: float = 1.0,
) -> LockScan:
    """Polarimeter traces for a back-mirror scan across resonance.

    ``phi0`` is a spurious phase on the signal beam.  The plates are balanced
    on the most strongly reflected (far off-resonant) point of the scan, which
    plays the role of the white-light operating point.
    """
    dz_c = np.asarray(dz_c, dtype=float)
    rho = np.asarray(total_reflectance(config.replace(dz_c=dz_c)), dtype=complex) * np.ones_like(dz_c)
    rho = rho * np.exp(1j * phi0)
    flux = photon_flux(input_power, config.wavelength) * efficiency
    f_in = FieldPair.linear(flux, alpha)

    ref = rho[np.argmax(np.abs(rho))]
    qwp, hwp = balance_compensation(stokes_from_fields(converter_reflect(f_in, ref)[0]))
    out, _ = converter_reflect(f_in, rho)
    s = stokes_from_fields(out)
    M = compensation_matrix(qwp, hwp)
    err = M[0, 0] * s.Sx + M[0, 1] * s.Sy + M[0, 2] * s.Sz
    power = input_power * (np.cos(alpha) ** 2 + np.sin(alpha) ** 2 * np.abs(rho) ** 2)
    return LockScan(dz_c=dz_c, total_power=power, error_signal=gain * err, qwp_angle=qwp, hwp_angle=hwp)


def central_slope(x, y, center: float, halfwidth: float) -> float:
    """Slope of a straight-line fit to ``y(x)`` within ``center +/- halfwidth``."""
    x = np.asarray(x)
    sel = np.abs(x - center) <= halfwidth
    if sel.sum() < 2:
        raise ValueError("fit window contains fewer than two samples")
    return float(np.polyfit(x[sel] - center, np.asarray(y)[sel], 1)[0])
