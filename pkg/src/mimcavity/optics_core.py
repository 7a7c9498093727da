"""Complex-amplitude transfer-matrix engine for chains of partial reflectors.

Every element links forward/backward amplitudes through the symmetric matrix
``[[t, r], [r, t]]`` with real ``r`` and ``t = i|t|``.  A chain is evaluated
back to front: the effective reflection seen just after element ``n`` is
``rho_n' = rho_{n+1} * gamma_n * exp(2 i k L_n)`` and the element then maps it
onto

    rho_n = (r_n + (t_n**2 - r_n**2) rho_n') / (1 - r_n rho_n')
    tau_n = t_n / (1 - r_n rho_n')

For a lossless element ``t_n**2 - r_n**2 = -1`` and ``rho_n`` reduces to
``(r_n - rho_n') / (1 - r_n rho_n')``.

All functions broadcast over numpy arrays of wavenumbers and segment lengths,
which is how the cavity scans evaluate whole grids in one call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

#: Absorption of the SiN membrane used when it is built from (n, d).
MEMBRANE_ABSORPTION = 1.6e-4

_TOL = 1e-12


@dataclass(frozen=True)
class OpticalElement:
    """A beam-splitter layer: mirror or membrane.

    ``r`` is the real amplitude reflection coefficient (sign allowed), ``t``
    the complex amplitude transmission and ``intrinsic_loss`` the absorbed
    power fraction.
    """

    r: float
    t: complex
    intrinsic_loss: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.intrinsic_loss <= 1.0:
            raise ValueError(f"intrinsic_loss must lie in [0, 1], got {self.intrinsic_loss}")
        total = self.r**2 + abs(self.t) ** 2 + self.intrinsic_loss
        if abs(total - 1.0) > _TOL:
            raise ValueError(f"|r|^2 + |t|^2 + loss = {total!r}, expected 1")

    @classmethod
    def from_angle(cls, theta: float) -> "OpticalElement":
        """Lossless element with ``r = sin(theta)`` and ``t = i cos(theta)``."""
        return cls(r=float(np.sin(theta)), t=1j * float(np.cos(theta)))

    @property
    def R(self) -> float:
        return self.r**2

    @property
    def T(self) -> float:
        return abs(self.t) ** 2

    def matrix(self) -> np.ndarray:
        return np.array([[self.t, self.r], [self.r, self.t]], dtype=complex)


@dataclass(frozen=True)
class PropagationSegment:
    """Free propagation over ``length`` metres with single-pass power factor ``gamma``.

    ``length`` may be a numpy array; it broadcasts against the wavenumber.
    """

    length: float | np.ndarray
    power_loss_factor: float = 1.0

    def __post_init__(self):
        if np.any(np.asarray(self.length) < 0):
            raise ValueError("segment length must be non-negative")
        if not 0.0 < self.power_loss_factor <= 1.0:
            raise ValueError(f"power_loss_factor must lie in (0, 1], got {self.power_loss_factor}")


@dataclass
class ChainResponse:
    rho: complex | np.ndarray
    tau: complex | np.ndarray
    per_element_rho: list = field(default_factory=list)

    @property
    def reflectance(self):
        return np.abs(self.rho) ** 2

    @property
    def transmittance(self):
        return np.abs(self.tau) ** 2


def element_from_powers(R: float, loss: float = 0.0) -> OpticalElement:
    """Build an element from its power reflectance and absorbed fraction."""
    if R < 0 or loss < 0:
        raise ValueError("reflectance and loss must be non-negative")
    if R + loss > 1.0 + _TOL:
        raise ValueError(f"R + loss = {R + loss} exceeds 1")
    T = max(1.0 - R - loss, 0.0)
    return OpticalElement(r=float(np.sqrt(R)), t=1j * float(np.sqrt(T)), intrinsic_loss=loss)


def membrane_reflectance(n: float, d: float, wavelength: float) -> float:
    """Power reflectance of a thin dielectric slab of index ``n`` and thickness ``d``."""
    if n <= 1:
        raise ValueError("refractive index must exceed 1")
    if d <= 0 or wavelength <= 0:
        raise ValueError("thickness and wavelength must be positive")
    phase = n * 2 * np.pi / wavelength * d
    s = np.sin(phase)
    if abs(s) < 1e-15:
        # cot -> infinity: the slab is a half-wave layer and reflects nothing
        return 0.0
    cot2 = (np.cos(phase) / s) ** 2
    return float((n**2 - 1) ** 2 / ((n**2 + 1) ** 2 + 4 * n**2 * cot2))


def membrane_coefficients(
    n: float, d: float, wavelength: float, absorption: float = MEMBRANE_ABSORPTION
) -> tuple[float, float]:
    """Return ``(R2, T2)`` for the membrane, with ``T2 = 1 - R2 - absorption``."""
    R2 = membrane_reflectance(n, d, wavelength)
    return R2, 1.0 - R2 - absorption


def membrane_element(
    n: float, d: float, wavelength: float, absorption: float = MEMBRANE_ABSORPTION
) -> OpticalElement:
    R2, _ = membrane_coefficients(n, d, wavelength, absorption)
    return element_from_powers(R2, absorption)


def chain_reflectance(
    elements: Sequence[OpticalElement],
    segments: Sequence[PropagationSegment],
    k,
) -> ChainResponse:
    """Effective reflection/transmission of a chain of elements.

    ``segments[n]`` separates ``elements[n]`` and ``elements[n + 1]``.  ``k``
    and the segment lengths may be arrays; results broadcast accordingly.
    """
    if len(segments) != len(elements) - 1:
        raise ValueError(
            f"need {len(elements) - 1} segments for {len(elements)} elements, got {len(segments)}"
        )
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise ValueError("wavenumber must be positive")

    # seeded with the empty space after the last element
    rho = np.zeros(1, dtype=complex)
    taus = []
    rhos = []
    for n in range(len(elements) - 1, -1, -1):
        el = elements[n]
        if n < len(elements) - 1:
            seg = segments[n]
            rho_p = rho * seg.power_loss_factor * np.exp(2j * k * np.asarray(seg.length))
        else:
            rho_p = rho
        denom = 1.0 - el.r * rho_p
        rho = (el.r + (el.t**2 - el.r**2) * rho_p) / denom
        taus.append(el.t / denom)
        rhos.append(rho)

    tau = np.ones(1, dtype=complex)
    for t_n in taus:
        tau = tau * t_n
    for seg in segments:
        tau = tau * np.sqrt(seg.power_loss_factor) * np.exp(1j * k * np.asarray(seg.length))

    rhos.reverse()
    return ChainResponse(rho=_squeeze(rho), tau=_squeeze(tau), per_element_rho=[_squeeze(x) for x in rhos])


def _squeeze(a):
    a = np.asarray(a)
    if a.size == 1:
        return complex(a.reshape(()))
    return a
