"""Simulation of a membrane-in-the-middle cavity read out by a polarisation interferometer."""

__version__ = "0.1.0"

from .beam_geometry import (  # noqa: F401
    AlignmentGeometry,
    GaussianBeam,
    lens_tolerance,
    overlap_numeric,
    overlap_tilted,
    tilt_wavenumber,
)
from .cavity_model import (  # noqa: F401
    CavityConfig,
    ScanAxis,
    dispersive_slope,
    find_resonances,
    finesse_empty,
    frequency_response,
    fsr,
    impedance_match_r1,
    reflectance_map,
    total_reflectance,
    tune_max_coupling,
)
from .noise_model import (  # noqa: F401
    DetectionConfig,
    MembraneConfig,
    estimate_psd,
    gain_from_shot_noise,
    mode_frequency,
    quantum_efficiency,
    signal_psd,
    synthesize_trace,
    thermal_psd,
)
from .optics_core import (  # noqa: F401
    OpticalElement,
    PropagationSegment,
    chain_reflectance,
    element_from_powers,
    membrane_coefficients,
)
from .polarimetry import (  # noqa: F401
    FieldPair,
    StokesVector,
    WavePlate,
    balance_compensation,
    converter_reflect,
    lock_scan,
    stokes_from_fields,
    waveplate_apply,
)
