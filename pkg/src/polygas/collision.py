"""Binary collision rule: energy gap, velocity transform, Jacobian, kernel.

All functions broadcast over leading axes; velocities carry a trailing axis
of length 3.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePairError, DomainError, InadmissibleCollisionError

__all__ = [
    "CollisionChannel",
    "KernelSpec",
    "delta_energy",
    "scatter",
    "jacobian",
    "kernel_value",
    "reflect",
    "random_unit_vectors",
]


@dataclass(frozen=True)
class CollisionChannel:
    """Internal energies before (``eps_in``) and after (``eps_out``) a collision, in J."""

    eps_in1: float
    eps_in2: float
    eps_out1: float
    eps_out2: float

    def reversed(self) -> "CollisionChannel":
        return CollisionChannel(self.eps_out1, self.eps_out2, self.eps_in1, self.eps_in2)

    @property
    def released(self) -> float:
        """Internal energy handed to translation, ``eps + eps* - eps' - eps'*``."""
        return (self.eps_in1 + self.eps_in2) - (self.eps_out1 + self.eps_out2)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel ``b = C sqrt(Delta) 1{Delta >= 0}``, i.e. ``C/2 |v' - v'*|``."""

    C: float = 1.0

    def __post_init__(self):
        if not self.C > 0:
            raise DomainError("kernel constant must be positive")


def _released(channel):
    if isinstance(channel, CollisionChannel):
        return channel.released
    return np.asarray(channel, dtype=float)


def delta_energy(v, v_star, channel, m: float):
    """``|v - v*|^2 / 4 + (eps + eps* - eps' - eps'*) / m``.

    ``channel`` is a CollisionChannel or directly the released energy (array).
    """
    g = np.asarray(v, dtype=float) - np.asarray(v_star, dtype=float)
    return 0.25 * np.sum(g * g, axis=-1) + _released(channel) / m


def reflect(V, omega):
    """Reflection through the plane orthogonal to ``omega``: ``V - 2 (omega.V) omega``."""
    return V - 2.0 * np.sum(omega * V, axis=-1, keepdims=True) * omega


def scatter(v, v_star, channel, omega, m: float, check: bool = True):
    """Post-collision velocities for the given channel and unit vector ``omega``.

    ``v' = (v + v*)/2 + sqrt(Delta) T_omega[g/|g|]`` and the opposite sign for
    ``v'*``.  Scattering with the reversed channel and the same ``omega``
    undoes the map.
    """
    v = np.asarray(v, dtype=float)
    v_star = np.asarray(v_star, dtype=float)
    omega = np.asarray(omega, dtype=float)
    g = v - v_star
    gn = np.sqrt(np.sum(g * g, axis=-1, keepdims=True))
    d = 0.25 * gn[..., 0] ** 2 + _released(channel) / m
    if check:
        if np.any(gn == 0):
            raise DegeneratePairError("v == v_star: relative direction undefined")
        if np.any(d < 0):
            raise InadmissibleCollisionError("energy gap Delta < 0")
    half = np.sqrt(np.maximum(d, 0.0))[..., None] * reflect(g / gn, omega)
    centre = 0.5 * (v + v_star)
    return centre + half, centre - half


def jacobian(v, v_star, channel, m: float):
    """Jacobian of the velocity map, ``|v' - v'*| / |v - v*| = 2 sqrt(Delta) / |v - v*|``."""
    g = np.asarray(v, dtype=float) - np.asarray(v_star, dtype=float)
    gn = np.sqrt(np.sum(g * g, axis=-1))
    d = 0.25 * gn**2 + _released(channel) / m
    if np.any(d <= 0):
        raise DomainError("Jacobian needs Delta > 0")
    if np.any(gn == 0):
        raise DegeneratePairError("v == v_star")
    return 2.0 * np.sqrt(d) / gn


def kernel_value(spec: KernelSpec, v, v_star, channel, omega=None, m: float = 1.0):
    """Collision kernel; zero for inadmissible channels, independent of ``omega``."""
    d = delta_energy(v, v_star, channel, m)
    return spec.C * np.sqrt(np.maximum(d, 0.0)) * (d >= 0)


def random_unit_vectors(rng: np.random.Generator, n: int | None = None):
    """Uniform directions on the unit sphere."""
    shape = (3,) if n is None else (n, 3)
    x = rng.standard_normal(shape)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)
