"""
Relaxation of a polyatomic gas toward equilibrium
=================================================

A gas whose internal energy is a flat density is binned into three levels
and started far from equilibrium: two counter-streaming beams with an
inverted level population.  Collisions drive it to the Maxwellian whose
temperature is fixed in advance by the conserved energy, and the
histogram estimate of H decreases along the way.
"""

import numpy as np

from polygas import KernelSpec, PhysicalConstants, bin_measure, delta_dof, ground
from polygas.dsmc import HGrid, init_ensemble, make_rng, relax
from polygas.reduction import BinningSpec
from polygas.thermo import theta_inv

units = PhysicalConstants.reduced()

###############################################################################
# Bin the flat density on [0, 3]: three levels at 0.5, 1.5 and 2.5 with unit
# degeneracy.

levels = bin_measure(ground((0.0, [], [(1.0, 0.0, 0.0)])), BinningSpec((0.0, 1.0, 2.0, 3.0)))
print("levels", levels.energies, "degeneracies", levels.degeneracies)

N = 50_000
ens = init_ensemble(levels, N, 1.0, 0.0, 1.0, make_rng(1), kind="twobeam+inverted",
                    constants=units, kernel=KernelSpec(1 / 9))

###############################################################################
# The final temperature follows from the energy per particle alone.

u = ens.v.mean(0)
T_final = theta_inv(ens.thermo, ens.total_energy() / N - 0.5 * u @ u)
print(f"predicted final temperature {T_final:.5f}")

report = relax(ens, 60, 0.1, make_rng(2), grid=HGrid.thermal(u, T_final, units), record_every=5, n_boot=10)

print("\n   t      T_est     H        +-       level populations")
for t, T, H, se, h in zip(report.t, report.T_est, report.H_est, report.H_se, report.level_hist):
    print(f"{t:5.1f}  {T:8.5f}  {H:8.4f}  {se:6.4f}  " + "  ".join(f"{x:.4f}" for x in h))

e = np.asarray(levels.energies) - levels.energies[0]
w = np.exp(-e / T_final)
print("\nGibbs populations at T_final       " + "  ".join(f"{x:.4f}" for x in w / w.sum()))
print(f"mean internal energy {np.mean(ens.eps_bar[ens.level]):.5f}, "
      f"delta/2 kT {delta_dof(ens.thermo, T_final) / 2 * T_final:.5f}")
