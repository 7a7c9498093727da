#
# Lens-position tolerance of the two-beam overlap, and detector calibration
# from a measured shot-noise slope.
#
import numpy as np

from mimcavity.beam_geometry import AlignmentGeometry, GaussianBeam, lens_tolerance, overlap_numeric, overlap_tilted, tilt_wavenumber
from mimcavity.noise_model import DetectionConfig, gain_from_shot_noise, quantum_efficiency, shot_noise_psd

g = AlignmentGeometry(d=4e-3, f_i=0.3, wavelength=795e-9, waist=0.7e-3)
print("  dz [mm]   dk [1/m]   overlap   quadrature")
for dz in np.linspace(-2e-3, 2e-3, 9):
    gd = AlignmentGeometry(d=g.d, f_i=g.f_i, wavelength=g.wavelength, waist=g.waist, dz=dz)
    dk = tilt_wavenumber(gd)
    num = overlap_numeric(GaussianBeam(g.waist), GaussianBeam(g.waist, tilt_x=dk))
    print("  %+6.2f   %8.1f    %.5f   %.5f" % (dz * 1e3, dk, overlap_tilted(dk, g.waist), num))
for target in (0.95, 0.985):
    print("overlap >= %.3f needs the lens within +/-%.2f mm" % (target, lens_tolerance(target, g) * 1e3))

slope, responsivity = 2.4e-7, 0.56
g_el = gain_from_shot_noise(slope, responsivity)
eta = quantum_efficiency(responsivity, 795e-9)
print("\nshot-noise slope %.2e V^2/Hz/W -> g_el = %.3e V/Hz, eta = %.3f" % (slope, g_el, eta))
for P in (2e-6, 8.3e-6, 20e-6):
    det = DetectionConfig(g_el=g_el, detected_power=P)
    print("  P_d = %5.1f uW: shot floor %.3e V^2/Hz" % (P * 1e6, 2 * shot_noise_psd(det)))
