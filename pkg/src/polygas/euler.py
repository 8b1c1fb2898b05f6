"""One-dimensional compressible Euler equations closed by the internal-state model.

Energy bookkeeping: the total energy density is
``E = rho eps0 / m + rho u^2 / 2 + (rho / m) Theta(T)`` with pressure
``p = (rho / m) k_B T``.  The solver evolves the part of ``E`` without the
ground-energy term; since that term is ``eps0 / m`` times the density, its
flux is ``eps0 / m`` times the mass flux and it can be added back at output
without influencing ``(rho, u, T)``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConversionError, DomainError, PositivityError
from .thermo import ThermoModel, heat_capacity, theta, theta_inv

__all__ = [
    "PrimitiveState",
    "ConservedState",
    "convert_state",
    "sound_speed",
    "Mesh",
    "advance_1d",
    "sod_mesh",
    "write_snapshot",
]


@dataclass(frozen=True)
class PrimitiveState:
    rho: np.ndarray
    u: np.ndarray
    T: np.ndarray


@dataclass(frozen=True)
class ConservedState:
    """Mass, momentum and total energy densities (``E`` includes ``rho eps0 / m``)."""

    rho: np.ndarray
    mom: np.ndarray
    E: np.ndarray


def _prim_to_cons(s: PrimitiveState, model: ThermoModel, excl: bool = False) -> ConservedState:
    rho, u, T = (np.asarray(x, dtype=float) for x in (s.rho, s.u, s.T))
    if np.any(~(rho > 0)) or np.any(~(T > 0)):
        raise ConversionError("primitive state needs rho > 0 and T > 0")
    m = model.mass
    E = 0.5 * rho * u * u + rho / m * theta(model, T)
    if not excl:
        E = E + rho * model.epsilon0 / m
    return ConservedState(rho, rho * u, E)


def _cons_to_prim(s: ConservedState, model: ThermoModel, excl: bool = False,
                  err=ConversionError) -> PrimitiveState:
    rho, mom, E = (np.asarray(x, dtype=float) for x in (s.rho, s.mom, s.E))
    if np.any(~(rho > 0)):
        raise err("nonpositive density")
    m = model.mass
    u = mom / rho
    e = E - 0.5 * mom * u
    if not excl:
        e = e - rho * model.epsilon0 / m
    e_mol = e * m / rho
    if np.any(~(e_mol > 0)):
        raise err("nonpositive internal energy")
    return PrimitiveState(rho, u, theta_inv(model, e_mol))


def convert_state(s, model: ThermoModel):
    """Primitive to conserved or back; ``T`` is recovered through ``Theta^-1``."""
    if isinstance(s, PrimitiveState):
        return _prim_to_cons(s, model)
    if isinstance(s, ConservedState):
        return _cons_to_prim(s, model)
    raise TypeError("expected a PrimitiveState or ConservedState")


def sound_speed(model: ThermoModel, T):
    """``c^2 = (1 + 2 / (3 + D(T))) k_B T / m``; exact for constant ``D``."""
    D, _ = heat_capacity(model, T)
    return np.sqrt((1.0 + 2.0 / (3.0 + D)) * model.constants.k_B * np.asarray(T) / model.mass)


@dataclass(frozen=True)
class Mesh:
    """Uniform 1D mesh of cell averages; ``E`` excludes the ground-energy term."""

    x: np.ndarray
    rho: np.ndarray
    mom: np.ndarray
    E: np.ndarray
    t: float = 0.0
    bc: str = "transmissive"

    def __post_init__(self):
        if self.bc not in ("periodic", "transmissive"):
            raise DomainError(f"unknown boundary condition {self.bc!r}")
        if len(self.x) < 2:
            raise DomainError("need at least two cells")

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @classmethod
    def from_primitive(cls, x, prim: PrimitiveState, model: ThermoModel, bc: str = "transmissive") -> "Mesh":
        c = _prim_to_cons(prim, model, excl=True)
        return cls(np.asarray(x, dtype=float), c.rho, c.mom, c.E, 0.0, bc)

    def primitive(self, model: ThermoModel) -> PrimitiveState:
        return _cons_to_prim(ConservedState(self.rho, self.mom, self.E), model, excl=True, err=PositivityError)

    def total_energy(self, model: ThermoModel) -> np.ndarray:
        """Energy density including ``rho eps0 / m``."""
        return self.E + self.rho * model.epsilon0 / model.mass

    def totals(self, model: ThermoModel) -> np.ndarray:
        """Integrated mass, momentum and total energy."""
        return self.dx * np.array([self.rho.sum(), self.mom.sum(), self.total_energy(model).sum()])


def _fluxes(rho, mom, E, p, u):
    return rho * u, mom * u + p, (E + p) * u


def advance_1d(mesh: Mesh, model: ThermoModel, cfl: float, t_end: float, max_steps: int = 10**7) -> Mesh:
    """March the mesh to ``t_end`` with a first-order Rusanov scheme."""
    if not 0 < cfl < 1:
        raise DomainError("cfl must lie in (0, 1)")
    if t_end < mesh.t:
        raise DomainError("t_end is before the mesh time")
    m, kB = model.mass, model.constants.k_B
    rho, mom, E = mesh.rho.copy(), mesh.mom.copy(), mesh.E.copy()
    t, dx = mesh.t, mesh.dx
    for _ in range(max_steps):
        if t >= t_end:
            break
        prim = _cons_to_prim(ConservedState(rho, mom, E), model, excl=True, err=PositivityError)
        u, T = prim.u, prim.T
        p = rho / m * kB * T
        a = np.abs(u) + sound_speed(model, T)
        dt = min(cfl * dx / float(a.max()), t_end - t)
        if mesh.bc == "periodic":
            pad = lambda q: np.concatenate([q[-1:], q, q[:1]])
        else:
            pad = lambda q: np.concatenate([q[:1], q, q[-1:]])
        R, Mo, En, P, U, A = (pad(q) for q in (rho, mom, E, p, u, a))
        F = _fluxes(R, Mo, En, P, U)
        Q = (R, Mo, En)
        s = np.maximum(A[:-1], A[1:])
        face = [0.5 * (f[:-1] + f[1:]) - 0.5 * s * (q[1:] - q[:-1]) for f, q in zip(F, Q)]
        lam = dt / dx
        rho = rho - lam * (face[0][1:] - face[0][:-1])
        mom = mom - lam * (face[1][1:] - face[1][:-1])
        E = E - lam * (face[2][1:] - face[2][:-1])
        t += dt
        if np.any(~(rho > 0)):
            raise PositivityError(f"density lost positivity at t = {t:.6g}")
    else:
        raise DomainError("max_steps exhausted")
    return replace(mesh, rho=rho, mom=mom, E=E, t=t)


def sod_mesh(model: ThermoModel, cells: int = 400, left=(1.0, 0.0, 1.0), right=(0.125, 0.0, 0.1),
             length: float = 1.0, x0: float = 0.5, bc: str = "transmissive") -> Mesh:
    """Shock tube from ``(rho, u, p)`` states; ``T = p m / (rho k_B)``."""
    x = (np.arange(cells) + 0.5) * length / cells
    lt = x < x0
    m, kB = model.mass, model.constants.k_B
    rho = np.where(lt, left[0], right[0])
    u = np.where(lt, left[1], right[1])
    p = np.where(lt, left[2], right[2])
    return Mesh.from_primitive(x, PrimitiveState(rho, u, p * m / (rho * kB)), model, bc)


def write_snapshot(mesh: Mesh, model: ThermoModel, path) -> None:
    """CSV with columns x, rho, u, T, p."""
    prim = mesh.primitive(model)
    p = prim.rho / model.mass * model.constants.k_B * prim.T
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "rho", "u", "T", "p"])
        for row in zip(mesh.x, prim.rho, prim.u, prim.T, p):
            w.writerow([format(float(v), ".17g") for v in row])
