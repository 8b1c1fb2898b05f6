"""Kinetic toolkit for polyatomic gases with general internal-state models."""
from .collision import CollisionChannel, KernelSpec, delta_energy, jacobian, kernel_value, scatter
from .errors import *  # noqa: F401,F403
from .measure import Atom, EnergyMeasure, ShiftedPowerTerm, convolve, ground, laplace_moment
from .models import (
    HF_CONSTANTS,
    ContinuousPower,
    DiscreteLevels,
    Monoatomic,
    PhysicalConstants,
    Product,
    QuadraticClassical,
    SpectroscopicConstants,
    build_hf_model,
    inertia_from_rotational_constant,
    product,
)
from .reduction import BinningSpec, bin_measure, density_at, reduce
from .thermo import (
    ThermoModel,
    delta_dof,
    equilibrium_energy,
    gibbs_sample,
    heat_capacity,
    maxwellian_density,
    partition_Z,
    theta,
    theta_inv,
)

__version__ = "0.1.0"
