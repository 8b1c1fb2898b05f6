"""
Internal degrees of freedom of hydrogen fluoride
================================================

Four models of the HF molecule, from a rigid rotor plus harmonic ladder to
the full rovibrational level set, and the number of internal degrees of
freedom each one gives as a function of temperature.
"""

import numpy as np

from polygas import PhysicalConstants, ThermoModel, build_hf_model, delta_dof, heat_capacity
from polygas.models import HF_CONSTANTS, inertia_from_rotational_constant

si = PhysicalConstants()
inertia = inertia_from_rotational_constant(HF_CONSTANTS.B_over_hc, si)

###############################################################################
# Build the four variants.  Variant 1 has a closed form: the classical rotor
# contributes 2 and the harmonic ladder a Planck-like term.

models = {v: ThermoModel.from_model(build_hf_model(v, inertia=inertia), si) for v in (1, 2, 3, 4)}

T_vib = si.hc * HF_CONSTANTS.nu_e / si.k_B
print(f"vibrational temperature {T_vib:.1f} K")

Ts = np.geomspace(10, 1e4, 13)
x = T_vib / Ts
closed = 2 + 2 * x / np.expm1(x)
print("\n     T [K]   delta_1   closed form   delta_2   delta_3   delta_4")
for T, c, *d in zip(Ts, closed, *(delta_dof(models[v], Ts) for v in (1, 2, 3, 4))):
    print(f"{T:10.1f}  {d[0]:8.5f}  {c:12.5f}  {d[1]:8.5f}  {d[2]:8.5f}  {d[3]:8.5f}")

###############################################################################
# At high temperature the bounded level sets of variants 2 and 4 saturate:
# once most of their levels are populated, delta falls again, and so does
# the variance term D that enters the heat capacity.

Ts = np.geomspace(1e4, 1e6, 7)
print("\n     T [K]   delta_2   D_2       c_V,2")
D, cv = heat_capacity(models[2], Ts)
for T, d, Di, c in zip(Ts, delta_dof(models[2], Ts), D, cv):
    print(f"{T:10.0f}  {d:8.5f}  {Di:8.5f}  {c:8.5f}")
