"""How large can the cat be?

The tunnel splitting falls exponentially with N while k_B T does not. The
doublet stays resolvable only while Delta E > k_B T, giving a critical size
N_c. The leading-log estimate ln(C0/kT)/S undershoots the full root by a
factor of three to six because the sqrt(N) prefactor is not negligible.
"""
import numpy as np

from lmg_lab import ModelParams, solve
from lmg_lab.semiclassics import FITTED_C0_OVER_KBT, fit_c0, goldilocks, instanton_splitting

for g, c0 in FITTED_C0_OVER_KBT.items():
    row = goldilocks(g, c0)
    print(f"Gamma/J = {g:.2f}:  S = {row.s_inst:.6f}  N_c leading-log {row.nc_analytic:7.1f}"
          f"  full root {row.nc_root:7.1f}  (C0 +-5%: {row.nc_root_lo:.0f} to {row.nc_root_hi:.0f})")

# Exact splittings against the instanton form with a prefactor fitted to them.
# The one-parameter form tracks the exact values only to about 15% here.
ns = np.arange(50, 401, 50)
exact = np.array([solve(ModelParams(int(n), 0.95), n_lowest=2).delta_e
                  * ModelParams(int(n), 0.95).j_phys for n in ns])
kbt = ModelParams(50, 0.95).kbt_phys
c0 = fit_c0(ns, exact / kbt, 0.95)
print(f"\nfitted C0/kT at Gamma/J = 0.95: {c0:.3f}")
for n, e in zip(ns, exact):
    print(f"N = {n:3d}  Delta E / kT = {e / kbt:9.4f}  instanton {instanton_splitting(n, 0.95, c0):9.4f}")
