"""
Sod shock tube for gases with internal structure
================================================

The same Riemann problem run for a monoatomic gas, a classical diatomic
rotor and a gas whose internal energy is a discrete two-level system.  The
internal model enters only through the caloric equation of state.
"""

import numpy as np

from polygas import PhysicalConstants, ThermoModel, ground
from polygas.euler import advance_1d, sod_mesh
from polygas.models import Monoatomic, QuadraticClassical

units = PhysicalConstants.reduced()

gases = {
    "monoatomic": ThermoModel.from_model(Monoatomic(), units),
    "rotor (delta = 2)": ThermoModel.from_model(QuadraticClassical((1.0, 1.0)), units),
    # levels at 0 and 0.5 kT_left: delta changes across the tube
    "two-level": ThermoModel(ground((0.0, [(0.0, 1.0), (0.5, 1.0)], [])), units),
}

###############################################################################
# Advance each tube to t = 0.2 on 400 cells and sample the profiles.

probe = np.array([0.1, 0.3, 0.5, 0.6, 0.7, 0.8, 0.9])
for name, tm in gases.items():
    mesh = advance_1d(sod_mesh(tm, 400), tm, 0.9, 0.2)
    prim = mesh.primitive(tm)
    idx = np.searchsorted(mesh.x, probe)
    print(f"\n{name}")
    print("    x     rho      u        T")
    for i in idx:
        print(f"{mesh.x[i]:6.3f}  {prim.rho[i]:7.4f}  {prim.u[i]:7.4f}  {prim.T[i]:7.4f}")
