"""Alignment tolerances of the displacer / imaging-lens / cavity interferometer.

A lens-to-mirror distance error ``dz`` tilts the returning reference beam by
``tan(alpha) = 2 d dz / f_i**2``; the resulting transverse wavenumber mismatch
sets the field overlap with the signal beam.  The closed forms assume
collimated beams, i.e. a Rayleigh range ``pi w**2 / lambda`` well beyond
``f_i``; :func:`overlap_numeric` handles curvature and offsets by quadrature.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate


@dataclass(frozen=True)
class AlignmentGeometry:
    d: float  # beam separation at the displacer (m)
    f_i: float  # imaging focal length (m)
    wavelength: float
    waist: float  # collimated 1/e^2 radius w (m)
    dz: float = 0.0  # lens-mirror distance error (m)

    def __post_init__(self):
        for name in ("d", "f_i", "wavelength", "waist"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class GaussianBeam:
    """Fundamental Gaussian field in a transverse plane.

    ``tilt_x``/``tilt_y`` are transverse wavenumbers (rad/m), ``x0``/``y0``
    lateral offsets and ``curvature`` the wavefront radius (``inf`` = flat).
    """

    waist: float
    tilt_x: float = 0.0
    tilt_y: float = 0.0
    x0: float = 0.0
    y0: float = 0.0
    curvature: float = np.inf
    wavelength: float = 795e-9

    def field(self, x, y):
        r2 = (x - self.x0) ** 2 + (y - self.y0) ** 2
        phase = self.tilt_x * x + self.tilt_y * y
        if np.isfinite(self.curvature):
            phase = phase + np.pi * r2 / (self.wavelength * self.curvature)
        return np.sqrt(2 / np.pi) / self.waist * np.exp(-r2 / self.waist**2 + 1j * phase)


def tilt_angle(g: AlignmentGeometry) -> float:
    return float(np.arctan(2 * g.d * g.dz / g.f_i**2))


def tilt_wavenumber(g: AlignmentGeometry, exact: bool = False) -> float:
    """Transverse wavenumber difference between tilted and ideal reference beam."""
    slope = 2 * g.d * g.dz / g.f_i**2
    if abs(slope) >= 0.1:
        warnings.warn("lens error outside the small-angle regime", stacklevel=2)
    if exact:
        return float(2 * np.pi / g.wavelength * np.sin(np.arctan(slope)))
    return float(2 * np.pi / g.wavelength * slope)


def fringe_frequency(g: AlignmentGeometry) -> float:
    """Spatial fringe frequency (cycles/m) of the recombined beams."""
    return tilt_wavenumber(g) / (2 * np.pi)


def overlap_tilted(dk, waist):
    """Field overlap of two collimated Gaussians differing by transverse wavenumber ``dk``."""
    if waist <= 0:
        raise ValueError("waist must be positive")
    return np.exp(-np.asarray(dk) ** 2 * waist**2 / 8)


def lens_tolerance(target: float, g: AlignmentGeometry) -> float:
    """Largest lens distance error that keeps the overlap at ``target``."""
    if not 0 < target < 1:
        raise ValueError("target overlap must lie in (0, 1)")
    dk = np.sqrt(-8 * np.log(target)) / g.waist
    return float(dk * g.wavelength * g.f_i**2 / (2 * np.pi * 2 * g.d))


def alignment_table(g: AlignmentGeometry, dz_values) -> list[tuple[float, float, float]]:
    """Rows of ``(dz, fringe frequency, overlap)`` for the given lens errors."""
    rows = []
    for dz in np.atleast_1d(dz_values):
        gi = AlignmentGeometry(g.d, g.f_i, g.wavelength, g.waist, float(dz))
        dk = tilt_wavenumber(gi)
        rows.append((float(dz), abs(dk) / (2 * np.pi), float(overlap_tilted(dk, g.waist))))
    return rows


class QuadratureError(RuntimeError):
    pass


def overlap_numeric(a: GaussianBeam, b: GaussianBeam, extent: float = 8.0, tol: float = 1e-9) -> float:
    """|<a|b>| by adaptive 2D quadrature over a square of half-width ``extent * w``.

    Each field is unit-normalised, so identical beams give 1.
    """
    if a.waist <= 0 or b.waist <= 0:
        raise ValueError("waists must be positive")
    if extent < 6:
        raise ValueError("integration domain must span at least 6 waists")
    wmax = max(a.waist, b.waist)
    cx = 0.5 * (a.x0 + b.x0)
    cy = 0.5 * (a.y0 + b.y0)
    half = extent * wmax + 0.5 * max(abs(a.x0 - b.x0), abs(a.y0 - b.y0))

    def integrand(y, x, part):
        v = np.conj(a.field(x, y)) * b.field(x, y)
        return v.real if part == 0 else v.imag

    total = 0j
    err = 0.0
    for part in (0, 1):
        val, e = integrate.dblquad(
            integrand, cx - half, cx + half, cy - half, cy + half,
            args=(part,), epsabs=tol, epsrel=tol,
        )
        total += val if part == 0 else 1j * val
        err += e
    if err > 1e-6:
        raise QuadratureError(f"overlap quadrature did not converge (error estimate {err:.2e})")
    return float(abs(total))
