#
# Detected noise spectra: thermal membrane modes on shot, electronic and laser
# frequency noise, a synthesised 0.2 s trace, and its averaged periodogram.
#
import numpy as np

from mimcavity.cavity_model import CavityConfig, dispersive_slope, frequency_response, tune_max_coupling
from mimcavity.noise_model import (
    DetectionConfig, FrequencyNoiseTable, MembraneConfig, alias_frequency, estimate_psd,
    membrane_mode, signal_psd, synthesize_trace, thermal_variance,
)

fs = 2.5e6
cav = tune_max_coupling(CavityConfig(R2=0.232, gamma1=0.994), match_impedance=True)
chi, chi_f = dispersive_slope(cav).chi, frequency_response(cav).chi_f
det = DetectionConfig(input_power=11.1e-6, eta=0.88, electronic_floor=4.6e-12)
# slightly rectangular membrane with a 480 Hz linewidth: the (1,2)/(2,1) pair splits
mc = MembraneConfig(side_a=0.9951889533946357e-3, side_b=1.0051408429285823e-3, damping=2 * np.pi * 480)

fundamental = membrane_mode(mc)
print("fundamental mode %.1f kHz, thermal rms %.2e m" % (fundamental.frequency / 1e3, np.sqrt(fundamental.variance)))
print("voltage variance of the fundamental %.3e V^2" % thermal_variance(fundamental, chi, det))

laser = FrequencyNoiseTable([1e4, 1e5, 1e6], [40.0, 10.0, 2.5])
modes = [membrane_mode(mc, m, n) for m, n in [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1)]]
model = signal_psd(modes, chi, det, chi_f=chi_f, laser_noise=laser)

print("\n  f [kHz]   total      thermal    shot       electr.    freq.   [V^2/Hz one-sided]")
for f in (100e3, 397e3, 500e3, 626e3, 628e3, 630e3, 794e3, 884e3, 891e3, 1.1e6):
    row = [model.one_sided(f)] + [model.one_sided(f, c) for c in model.labels]
    print("  %7.1f  " % (f / 1e3) + "  ".join("%.3e" % v for v in row))

x = synthesize_trace(model, fs, 0.2, seed=1)
f, G = estimate_psd(x, fs, 5000, averages=100)
band = (f >= 80e3) & (f <= 1e6)
ratio = G[band] / (2 * model.folded(f[band], fs))
print("\nestimate / model over 80 kHz - 1 MHz: mean %.3f, scatter %.3f (100 averages)" % (ratio.mean(), ratio.std()))
print("a mode at 1.35 MHz would appear at %.2f MHz" % (alias_frequency(1.35e6, fs) / 1e6))
