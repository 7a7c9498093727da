#
# Polarimetric error signal while scanning the back mirror through resonance.
#
import numpy as np

from mimcavity.cavity_model import CavityConfig, dispersive_slope, tune_max_coupling
from mimcavity.polarimetry import central_slope, lock_scan

lam = 795e-9
alpha = np.deg2rad(37.5)

cav = tune_max_coupling(CavityConfig(R2=0.232, gamma1=0.994), match_impedance=True)
chi = dispersive_slope(cav).chi
width = 1 / abs(chi)

dz = np.linspace(-lam / 4, lam / 4, 200001)
scan = lock_scan(cav, alpha, dz, input_power=11.1e-6, phi0=0.4, gain=5.24e-13, efficiency=0.88)
print("compensation: QWP %.1f deg, HWP %.1f deg" % tuple(np.rad2deg([scan.qwp_angle, scan.hwp_angle])))

i0 = np.argmin(scan.total_power)
print("reflected power: off resonance %.2f uW, on resonance %.3f uW"
      % (scan.total_power.max() * 1e6, scan.total_power[i0] * 1e6))
print("error signal extrema: %+.3f V at %+.2f nm, %+.3f V at %+.2f nm"
      % (scan.error_signal.max(), dz[np.argmax(scan.error_signal)] * 1e9,
         scan.error_signal.min(), dz[np.argmin(scan.error_signal)] * 1e9))
slope = central_slope(dz, scan.error_signal, 0.0, 0.05 * width)
print("lock slope %.3e V/m; dispersive width 1/|chi| = %.2f nm" % (slope, width * 1e9))

print("\n  dz_c [nm]   error [V]")
for x in np.linspace(-3 * width, 3 * width, 13):
    print("  %+8.3f   %+.4f" % (x * 1e9, np.interp(x, dz, scan.error_signal)))
