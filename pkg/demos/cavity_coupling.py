#
# Dispersive coupling of a membrane inside a three-mirror cavity.
#
# Tunes the cavity to maximal coupling, matches the front mirror, compares the
# numerical slope with its closed forms, and walks the avoided-crossing map.
#
import numpy as np

from mimcavity.cavity_model import (
    CavityConfig, ScanAxis, dispersive_slope, find_resonances, frequency_response,
    reflectance_map, total_reflectance, tune_max_coupling,
)

lam = 795e-9

# operating point: front sub-cavity anti-resonant, back one resonant, r1 matched
cav = tune_max_coupling(CavityConfig(R2=0.232, gamma1=0.994), match_impedance=True)
print("matched front mirror R1 = %.6f" % cav.R1)
print("|rho_1| at the operating point = %.2e" % abs(total_reflectance(cav)))

s = dispersive_slope(cav)
print("chi  numeric   = %.4e 1/m" % s.chi)
print("chi  expansion = %.4e 1/m" % (s.expansion / 1j).real)
print("chi  r3 -> 1   = %.4e 1/m  (perfect back mirror)" % (s.matched / 1j).real)
fr = frequency_response(cav)
print("chi_f numeric  = %.4e 1/Hz" % fr.chi_f)

# the same cavity with a perfect back mirror: the shortcut forms become exact
ideal = tune_max_coupling(cav.replace(R3=1.0), match_impedance=True)
si = dispersive_slope(ideal)
print("R3 = 1: numeric %.4e vs closed form %.4e 1/m" % (si.chi, (si.matched / 1j).real))

# avoided crossings with a lossy front cavity (gamma1 = 0.8)
lossy = tune_max_coupling(CavityConfig(R2=0.232, gamma1=0.8))
zm = ScanAxis("dz_m", 0.0, lam, 81)
zc = ScanAxis("dz_c", 0.0, lam / 2, 801)
grid = reflectance_map(lossy, zm, zc)
branch = zc.values()[np.argmin(grid, axis=1)]
print("\n dz_m/lambda   resonance dz_c/lambda   dip depth")
for i in range(0, 81, 8):
    print("   %6.3f          %7.4f           %.3f" % (zm.values()[i] / lam, branch[i] / lam, grid[i].min()))

for dzm in (0.0, lam / 4):
    res = find_resonances(lossy.replace(dz_m=dzm), ScanAxis("dz_c", -lam / 4, lam / 4, 20001))
    print("dz_m = %.3f lambda: linewidth %.4f lambda" % (dzm / lam, res[0].linewidth / lam))
