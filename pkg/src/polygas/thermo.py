"""Equilibrium thermodynamics of a reduced internal-energy measure."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import measure as ms
from .errors import DomainError
from .measure import EnergyMeasure
from .models import InternalModel, PhysicalConstants

__all__ = [
    "ThermoModel",
    "partition_Z",
    "delta_dof",
    "heat_capacity",
    "theta",
    "theta_inv",
    "equilibrium_energy",
    "gibbs_sample",
    "maxwellian_density",
]

TABLE_RANGE = (1.0, 1e7)
TABLE_POINTS = 801


def _check_T(T, allow_zero=False):
    T = np.asarray(T, dtype=float)
    bad = ~(T >= 0) if allow_zero else ~(T > 0)
    if np.any(bad) or np.any(~np.isfinite(T)):
        raise DomainError("temperature must be positive and finite" if not allow_zero
                          else "temperature must be nonnegative and finite")
    return T


@dataclass(frozen=True)
class ThermoModel:
    """Grounded measure plus ground energy, with a cached table of ``T -> Theta(T)``."""

    measure: EnergyMeasure
    constants: PhysicalConstants = PhysicalConstants()
    t_range: tuple[float, float] = TABLE_RANGE
    _table: tuple[np.ndarray, np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lo, hi = self.t_range
        if not 0 < lo < hi:
            raise DomainError("bad temperature range for the Theta table")
        Ts = np.geomspace(lo, hi, TABLE_POINTS)
        th = theta(self, Ts)
        if np.any(np.diff(th) <= 0):
            raise DomainError("Theta table is not strictly increasing")
        object.__setattr__(self, "_table", (np.log(Ts), np.log(th)))

    @property
    def epsilon0(self) -> float:
        return self.measure.ground_offset

    @property
    def mass(self) -> float:
        return self.constants.mass

    @classmethod
    def from_model(cls, model: InternalModel, constants: PhysicalConstants = PhysicalConstants(),
                   **kw) -> "ThermoModel":
        from .reduction import reduce

        return cls(reduce(model), constants, **kw)


def _beta(model: ThermoModel, T):
    return 1.0 / (model.constants.k_B * T)


def partition_Z(model: ThermoModel, beta):
    """Partition function of the grounded energy."""
    return ms.laplace_moment(model.measure, 0, beta)


def _mean_var(model: ThermoModel, T):
    T = _check_T(T)
    mean, var = ms.gibbs_mean_var(model.measure, _beta(model, T))
    return T, mean, var


def delta_dof(model: ThermoModel, T, epsilon0: float | None = None):
    """Internal degrees of freedom, twice the Gibbs mean of ``eps_bar / kT``.

    With ``epsilon0`` the energy is measured from that value instead of the
    model's own ground energy; this compares a binned model, whose lowest
    level sits at the first bin mean, with the model it was binned from.
    """
    T, mean, _ = _mean_var(model, T)
    if epsilon0 is not None:
        mean = mean + (model.epsilon0 - epsilon0)
    out = 2.0 * mean / (model.constants.k_B * T)
    return out if np.ndim(out) else float(out)


def heat_capacity(model: ThermoModel, T):
    """``(D, c_V)`` with ``D`` twice the Gibbs variance of ``eps_bar / kT`` and ``c_V = (3 + D) / 2``."""
    T, _, var = _mean_var(model, T)
    D = 2.0 * var / (model.constants.k_B * T) ** 2
    if np.ndim(D) == 0:
        D = float(D)
    return D, (3.0 + D) / 2.0


def theta(model: ThermoModel, T):
    """Cumulative heat ``Theta(T) = 3/2 kT + <eps_bar>``, i.e. ``3/2 kT + kT delta / 2``."""
    T = _check_T(T, allow_zero=True)
    out = 1.5 * model.constants.k_B * T
    pos = T > 0
    if np.any(pos):
        mean, _ = ms.gibbs_mean_var(model.measure, _beta(model, T[pos]))
        out = np.array(out, dtype=float)
        out[pos] += mean
    return out if np.ndim(out) else float(out)


def _theta_prime(model: ThermoModel, T):
    _, cv = heat_capacity(model, T)
    return cv * model.constants.k_B


def theta_inv(model: ThermoModel, E, rtol: float = 1e-15, max_iter: int = 200):
    """Temperature with ``Theta(T) = E``.

    The root is bracketed by ``[0, E / (3/2 k_B)]`` since ``Theta >= 3/2 kT``.
    Starting from the tabulated guess, Newton steps (slope ``c_V k_B``) are
    taken and replaced by bisection whenever they leave the bracket.
    """
    E = np.asarray(E, dtype=float)
    if np.any(~(E >= 0)) or np.any(~np.isfinite(E)):
        raise DomainError("energy must be nonnegative and finite")
    scalar = E.ndim == 0
    E = np.atleast_1d(E).astype(float)
    T = np.zeros_like(E)
    live = E > 0
    if np.any(live):
        e = E[live]
        kB = model.constants.k_B
        lo = np.zeros_like(e)
        hi = e / (1.5 * kB)
        lt, lth = model._table
        guess = np.exp(np.interp(np.log(e), lth, lt))
        # outside the table, fall back to the pure-translation estimate
        outside = (np.log(e) < lth[0]) | (np.log(e) > lth[-1])
        x = np.where(outside, hi, np.clip(guess, 0, hi))
        x = np.where(x > 0, x, 0.5 * hi)
        todo = np.ones_like(e, dtype=bool)
        for _ in range(max_iter):
            idx = np.nonzero(todo)[0]
            if idx.size == 0:
                break
            xi = x[idx]
            f = theta(model, xi) - e[idx]
            lo[idx] = np.where(f < 0, xi, lo[idx])
            hi[idx] = np.where(f > 0, xi, hi[idx])
            step = f / _theta_prime(model, xi)
            xn = xi - step
            bad = ~((xn >= lo[idx]) & (xn <= hi[idx]))
            xn = np.where(bad, 0.5 * (lo[idx] + hi[idx]), xn)
            xn = np.where(f == 0, xi, xn)
            x[idx] = xn
            done = (np.abs(xn - xi) <= rtol * xn) | (f == 0) | (hi[idx] - lo[idx] <= rtol * hi[idx])
            todo[idx[done]] = False
        T[live] = x
    return float(T[0]) if scalar else T


def equilibrium_energy(model: ThermoModel, u, T) -> float:
    """Mean energy per molecule of the Maxwellian with velocity ``u`` and temperature ``T``."""
    T = float(_check_T(T))
    u = np.asarray(u, dtype=float)
    return model.epsilon0 + 0.5 * model.mass * float(u @ u) + theta(model, T)


def gibbs_sample(model: ThermoModel, T: float, rng: np.random.Generator, size: int | None = None):
    """Draw grounded energies from the Gibbs measure at ``T``.

    Returns ``(energies, levels)``; ``levels`` indexes ``measure.atoms`` when
    the measure is purely atomic and is ``None`` otherwise.
    """
    T = float(_check_T(T))
    kT = model.constants.k_B * T
    lw, mean, _ = ms.gibbs_mixture(model.measure, 1.0 / kT)
    p = np.exp(lw - lw.max())
    p /= p.sum()
    n = 1 if size is None else size
    comp = rng.choice(p.size, size=n, p=p)
    n_atoms = len(model.measure.atoms)
    out = np.empty(n)
    is_atom = comp < n_atoms
    if n_atoms:
        out[is_atom] = model.measure.atom_locations[comp[is_atom]]
    if model.measure.terms:
        _, s, a = model.measure.term_arrays
        j = comp[~is_atom] - n_atoms
        out[~is_atom] = s[j] + kT * rng.gamma(a[j] + 1.0)
    levels = comp if model.measure.is_atomic else None
    if size is None:
        return float(out[0]), (int(levels[0]) if levels is not None else None)
    return out, levels


def maxwellian_density(model: ThermoModel, rho: float, u, T: float, v, eps_bar):
    """Maxwellian phase-space density, per unit velocity volume and unit measure ``mu``."""
    if not rho > 0:
        raise DomainError("density must be positive")
    T = float(_check_T(T))
    m, kT = model.mass, model.constants.k_B * T
    v = np.asarray(v, dtype=float)
    dv = v - np.asarray(u, dtype=float)
    z = partition_Z(model, 1.0 / kT)
    pref = rho * m**0.5 * (2 * np.pi * kT) ** -1.5 / z
    return pref * np.exp(-m * np.sum(dv * dv, axis=-1) / (2 * kT) - np.asarray(eps_bar) / kT)
