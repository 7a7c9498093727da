"""Voltage noise spectra of the polarimeter and their time-domain round trip.

Two-sided densities ``S(f)`` are defined over signed frequency; the one-sided
density reported by spectrum analysers is ``G(|f|) = 2 S(f)``.  The detector
output is ``U = g_el * S_z`` with ``S_z`` in photons/s.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import signal
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import e as ELEMENTARY_CHARGE
from scipy.constants import h as PLANCK
from scipy.constants import k as BOLTZMANN


@dataclass(frozen=True)
class MembraneConfig:
    """Rectangular membrane under tensile stress (SI units, damping in rad/s)."""

    stress: float = 1.0e9
    density: float = 3170.0
    side_a: float = 1e-3
    side_b: float = 1e-3
    thickness: float = 50e-9
    damping: float = 2 * np.pi * 10.3e3
    temperature: float = 300.0

    def __post_init__(self):
        for name in ("stress", "density", "side_a", "side_b", "thickness", "damping", "temperature"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def effective_mass(self) -> float:
        return self.density * self.side_a * self.side_b * self.thickness / 4


def mode_frequency(m: int, n: int, mc: MembraneConfig) -> float:
    """Drum-mode frequency f_mn of the stressed rectangular membrane."""
    if m < 1 or n < 1:
        raise ValueError("mode indices start at 1")
    return float(0.5 * np.sqrt(mc.stress / mc.density) * np.hypot(m / mc.side_a, n / mc.side_b))


def alias_frequency(f: float, fs: float) -> float:
    """Apparent frequency of a tone at ``f`` after sampling at ``fs``."""
    r = np.mod(f, fs)
    return float(min(r, fs - r))


@dataclass(frozen=True)
class MechanicalMode:
    """One thermally driven mode; ``coupling`` scales the optical readout of it."""

    frequency: float
    damping: float  # energy loss rate, rad/s (2 pi FWHM)
    effective_mass: float
    temperature: float = 300.0
    coupling: float = 1.0

    def __post_init__(self):
        if self.damping > 0.1 * 2 * np.pi * self.frequency:
            warnings.warn("mode is not well underdamped; Lorentzian approximation is poor", stacklevel=3)

    @property
    def variance(self) -> float:
        """Equipartition displacement variance k_B T / (m omega^2) in m^2."""
        return BOLTZMANN * self.temperature / (self.effective_mass * (2 * np.pi * self.frequency) ** 2)

    def psd(self, f):
        """Two-sided displacement PSD in m^2/Hz."""
        f = np.abs(np.asarray(f, dtype=float))
        g = self.damping
        return self.variance * 2 * g / (16 * np.pi**2 * (f - self.frequency) ** 2 + g**2)


def membrane_mode(mc: MembraneConfig, m: int = 1, n: int = 1, coupling: float = 1.0) -> MechanicalMode:
    return MechanicalMode(mode_frequency(m, n, mc), mc.damping, mc.effective_mass, mc.temperature, coupling)


def thermal_psd(f, mc: MembraneConfig, m: int = 1, n: int = 1):
    """Two-sided thermal displacement PSD of mode (m, n) in m^2/Hz."""
    return membrane_mode(mc, m, n).psd(f)


@dataclass(frozen=True)
class DetectionConfig:
    """Balanced polarimeter settings.

    ``electronic_floor`` is the one-sided electronic noise density (V^2/Hz) as
    read off a spectrum analyser.  ``eta`` defaults to the quantum efficiency
    implied by ``responsivity``; ``detected_power`` defaults to the reference
    share ``cos(alpha)**2`` of the input, the signal beam being absorbed by the
    impedance-matched cavity.
    """

    g_el: float = 5.24e-13
    alpha: float = np.deg2rad(37.5)
    input_power: float = 11.1e-6
    wavelength: float = 795e-9
    eta: Optional[float] = None
    responsivity: float = 0.56
    detected_power: Optional[float] = None
    electronic_floor: float = 0.0
    sampling_rate: float = 2.5e6

    def __post_init__(self):
        if self.eta is not None and not 0 < self.eta <= 1:
            raise ValueError("eta must lie in (0, 1]")
        if self.input_power < 0 or (self.detected_power is not None and self.detected_power < 0):
            raise ValueError("optical powers must be non-negative")

    @property
    def efficiency(self) -> float:
        return quantum_efficiency(self.responsivity, self.wavelength) if self.eta is None else self.eta

    @property
    def S0_in(self) -> float:
        return 0.5 * self.input_power * self.wavelength / (PLANCK * SPEED_OF_LIGHT)

    @property
    def Sy_in(self) -> float:
        return self.S0_in * np.sin(2 * self.alpha)

    @property
    def P_d(self) -> float:
        if self.detected_power is not None:
            return self.detected_power
        return self.input_power * np.cos(self.alpha) ** 2


@dataclass(frozen=True)
class SpectrumComponent:
    label: str
    psd: Callable[[np.ndarray], np.ndarray]  # two-sided, V^2/Hz
    white: bool = False  # white floors are in-band levels and are not folded


@dataclass
class SpectrumModel:
    components: list[SpectrumComponent] = field(default_factory=list)

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.components]

    def component(self, label: str) -> SpectrumComponent:
        for c in self.components:
            if c.label == label:
                return c
        raise KeyError(label)

    def two_sided(self, f, label: Optional[str] = None):
        f = np.asarray(f, dtype=float)
        comps = self.components if label is None else [self.component(label)]
        total = np.zeros_like(f)
        for c in comps:
            total = total + c.psd(f) * np.ones_like(f)
        return total

    def one_sided(self, f, label: Optional[str] = None):
        return 2 * self.two_sided(np.abs(np.asarray(f, dtype=float)), label)

    def folded(self, f, fs: float, orders: int = 2):
        """Two-sided density seen after sampling at ``fs``.

        Content at ``f + j fs`` for ``|j| <= orders`` lands on ``f``; white floors
        are taken as already band-limited and pass unchanged.
        """
        f = np.asarray(f, dtype=float)
        total = np.zeros_like(f)
        for c in self.components:
            if c.white:
                total = total + c.psd(f) * np.ones_like(f)
                continue
            for j in range(-orders, orders + 1):
                total = total + c.psd(f + j * fs)
        return total


class FrequencyNoiseTable:
    """Measured one-sided laser frequency-noise density (Hz^2/Hz), log-f interpolated."""

    def __init__(self, freqs: Sequence[float], G_ff: Sequence[float]):
        freqs = np.asarray(freqs, dtype=float)
        G_ff = np.asarray(G_ff, dtype=float)
        if freqs.ndim != 1 or freqs.shape != G_ff.shape or len(freqs) < 2:
            raise ValueError("need matching 1-D frequency and density arrays")
        if np.any(freqs <= 0) or np.any(np.diff(freqs) <= 0):
            raise ValueError("table frequencies must be positive and increasing")
        if np.any(G_ff < 0):
            raise ValueError("densities must be non-negative")
        self.freqs = freqs
        self.G_ff = G_ff

    def one_sided(self, f):
        f = np.maximum(np.abs(np.asarray(f, dtype=float)), self.freqs[0])
        return np.interp(np.log(f), np.log(self.freqs), self.G_ff)

    def __call__(self, f):
        """Two-sided density."""
        return 0.5 * self.one_sided(f)


def signal_psd(
    modes: Sequence[MechanicalMode],
    chi: float,
    det: DetectionConfig,
    chi_f: float = 0.0,
    laser_noise: Optional[Callable] = None,
    overlap: float = 1.0,
) -> SpectrumModel:
    """Compose the detected voltage spectrum.

    ``chi`` (1/m) and ``chi_f`` (1/Hz) are the cavity's dispersive responses;
    ``overlap`` is a single efficiency multiplying ``chi``.  ``laser_noise`` is
    a two-sided frequency-noise density (Hz^2/Hz), e.g. a
    :class:`FrequencyNoiseTable`.
    """
    modes = list(modes)
    eta = det.efficiency
    signal_gain = det.g_el**2 * eta**2 * det.Sy_in**2
    K = signal_gain * (overlap * chi) ** 2

    freqs = sorted(m.frequency for m in modes)
    widths = max((m.damping / (2 * np.pi) for m in modes), default=0.0)
    if len(freqs) > 1 and np.min(np.diff(freqs)) < widths:
        warnings.warn("mode spacing is below the mechanical linewidth; peaks overlap", stacklevel=2)

    def thermal(f):
        total = np.zeros_like(np.asarray(f, dtype=float))
        for m in modes:
            total = total + m.coupling**2 * m.psd(f)
        return K * total

    shot_level = shot_noise_psd(det)
    floor = 0.5 * det.electronic_floor
    comps = [
        SpectrumComponent("thermal", thermal),
        SpectrumComponent("shot", lambda f: np.full_like(np.asarray(f, dtype=float), shot_level), white=True),
        SpectrumComponent("electronic", lambda f: np.full_like(np.asarray(f, dtype=float), floor), white=True),
    ]
    if laser_noise is not None:
        Kf = signal_gain * chi_f**2
        comps.append(SpectrumComponent("freqnoise", lambda f: Kf * laser_noise(f)))
    else:
        comps.append(SpectrumComponent("freqnoise", lambda f: np.zeros_like(np.asarray(f, dtype=float)), white=True))
    return SpectrumModel(comps)


def shot_noise_psd(det: DetectionConfig) -> float:
    """Two-sided shot-noise level g_el^2 eta Phi_d / 8 for detected flux Phi_d.

    This is the normalisation under which ``gain_from_shot_noise`` inverts the
    measured slope ``G_UU / P_d`` exactly.
    """
    phi_d = det.P_d * det.wavelength / (PLANCK * SPEED_OF_LIGHT)
    return det.g_el**2 * det.efficiency * phi_d / 8


def thermal_variance(mode: MechanicalMode, chi: float, det: DetectionConfig, overlap: float = 1.0) -> float:
    """Voltage variance (V^2) contributed by one mode, both spectral lobes."""
    return (det.g_el * det.efficiency * det.Sy_in * overlap * chi * mode.coupling) ** 2 * mode.variance


def gain_from_shot_noise(slope: float, responsivity: float) -> float:
    """Electronic gain (V per photon/s) from the shot-noise slope G_UU / P_d."""
    if slope <= 0 or responsivity <= 0:
        raise ValueError("slope and responsivity must be positive")
    return float(np.sqrt(4 * ELEMENTARY_CHARGE * slope / responsivity))


def quantum_efficiency(responsivity: float, wavelength: float) -> float:
    return float(responsivity * PLANCK * SPEED_OF_LIGHT / (ELEMENTARY_CHARGE * wavelength))


def synthesize_trace(
    model: SpectrumModel,
    fs: float,
    duration: float,
    seed: Optional[int] = None,
    alias_orders: int = 2,
    highpass: Optional[float] = None,
) -> np.ndarray:
    """Stationary Gaussian voltage trace whose sampled PSD is ``model.folded``.

    Each FFT bin receives an independent complex Gaussian amplitude.
    ``highpass`` applies a first-order high-pass corner (Hz) to the result.
    """
    if fs <= 0:
        raise ValueError("sampling rate must be positive")
    n = int(round(fs * duration))
    if n < 2:
        raise ValueError("trace needs at least two samples")
    rng = np.random.default_rng(seed)
    f = np.fft.rfftfreq(n, 1 / fs)
    S = model.folded(f, fs, alias_orders)
    if highpass:
        x = f / highpass
        S = S * x**2 / (1 + x**2)
    scale = np.sqrt(np.maximum(S, 0) * n * fs / 2)
    X = scale * (rng.standard_normal(len(f)) + 1j * rng.standard_normal(len(f)))
    X[0] = np.sqrt(2) * X[0].real
    if n % 2 == 0:
        X[-1] = np.sqrt(2) * X[-1].real
    return np.fft.irfft(X, n)


def estimate_psd(
    samples,
    fs: float,
    segment_length: int,
    averages: Optional[int] = None,
    window: str = "hann",
) -> tuple[np.ndarray, np.ndarray]:
    """One-sided averaged periodogram from non-overlapping segments.

    Bin spacing is ``fs / segment_length``.  The default Hann window keeps
    leakage from strong mechanical peaks out of the floor; ``"boxcar"`` makes
    the effective bandwidth equal to the bin spacing.
    """
    x = np.asarray(samples, dtype=float)
    available = len(x) // segment_length if segment_length > 0 else 0
    if available < 1:
        raise ValueError("insufficient data for a single segment")
    if averages is None:
        averages = available
    if averages > available:
        raise ValueError(f"insufficient data: {averages} averages requested, {available} available")
    x = x[: averages * segment_length]
    f, G = signal.welch(
        x, fs=fs, window=window, nperseg=segment_length, noverlap=0,
        detrend="constant", scaling="density", return_onesided=True,
    )
    return f, G
