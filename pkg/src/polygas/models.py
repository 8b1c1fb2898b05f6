"""State-based descriptions of a molecule's internal structure.

Each model is an immutable dataclass.  Energies are stored in joules; the
spectroscopic constructors take wavenumbers in cm^-1 and convert with h*c.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import CapTooSmallError, InvalidModelError

# exact SI values (CODATA 2018)
K_B = 1.380649e-23  # J/K
H_PLANCK = 6.62607015e-34  # J s
C_LIGHT_CM = 2.99792458e10  # cm/s
AMU = 1.66053906660e-27  # kg

#: tail Gibbs mass allowed beyond a truncated infinite ladder
TAIL_TOL = 1e-14
DEFAULT_T_MAX = 1e4
DEFAULT_J_CAP = 200


@dataclass(frozen=True)
class PhysicalConstants:
    k_B: float = K_B
    h: float = H_PLANCK
    c: float = C_LIGHT_CM
    mass: float = 20.006228 * AMU  # 1H19F

    def __post_init__(self):
        for name in ("k_B", "h", "c", "mass"):
            if not getattr(self, name) > 0:
                raise InvalidModelError(f"{name} must be positive")

    @property
    def hc(self) -> float:
        """Joules per cm^-1."""
        return self.h * self.c

    @classmethod
    def reduced(cls, mass: float = 1.0) -> "PhysicalConstants":
        """Unit system with k_B = h = c = 1, handy for dimensionless runs."""
        return cls(k_B=1.0, h=1.0, c=1.0, mass=mass)


@dataclass(frozen=True)
class SpectroscopicConstants:
    """Diatomic constants, all in cm^-1."""

    nu_e: float
    nu_e_x_e: float
    B_over_hc: float
    alpha_over_hc: float
    D_over_hc: float

    def __post_init__(self):
        vals = (self.nu_e, self.nu_e_x_e, self.B_over_hc, self.alpha_over_hc, self.D_over_hc)
        if not all(v > 0 for v in vals):
            raise InvalidModelError("spectroscopic constants must be positive")
        if not self.nu_e_x_e < self.nu_e:
            raise InvalidModelError("nu_e_x_e must be smaller than nu_e")

    @property
    def x_e(self) -> float:
        return self.nu_e_x_e / self.nu_e

    @property
    def n_max(self) -> int:
        """Highest bound vibrational quantum number of the Morse ladder."""
        return math.floor(1.0 / (2.0 * self.x_e)) - 1


#: 1H19F, CRC handbook values
HF_CONSTANTS = SpectroscopicConstants(
    nu_e=4138.39, nu_e_x_e=89.94, B_over_hc=20.95, alpha_over_hc=0.793, D_over_hc=0.00215
)


def inertia_from_rotational_constant(B_over_hc: float, constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Moment of inertia (kg m^2) of a rigid rotor with rotational constant B/hc in cm^-1."""
    return constants.h / (8 * math.pi**2 * constants.c * B_over_hc)


# ---------------------------------------------------------------------------
# model variants


@dataclass(frozen=True)
class Monoatomic:
    epsilon0: float = 0.0


@dataclass(frozen=True)
class ContinuousPower:
    """Weight ``coefficient * I**alpha`` on the internal energy ``I``."""

    coefficient: float = 1.0
    alpha: float = 0.0
    epsilon0: float = 0.0

    def __post_init__(self):
        if not self.coefficient > 0:
            raise InvalidModelError("coefficient must be positive")
        if not self.alpha > -1:
            raise InvalidModelError("alpha must be > -1")


@dataclass(frozen=True)
class DiscreteLevels:
    """Energy levels (J) with positive degeneracies.

    ``tail_bound`` records, for a truncated infinite ladder, the certified
    relative Gibbs mass left out at temperature ``t_max``.
    """

    energies: tuple[float, ...]
    degeneracies: tuple[float, ...]
    tail_bound: float = 0.0
    t_max: float | None = None
    labels: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        object.__setattr__(self, "degeneracies", tuple(float(r) for r in self.degeneracies))
        if not self.energies:
            raise InvalidModelError("DiscreteLevels needs at least one level")
        if len(self.energies) != len(self.degeneracies):
            raise InvalidModelError("energies and degeneracies differ in length")
        if not all(np.isfinite(self.energies)):
            raise InvalidModelError("level energies must be finite")
        if not all(r > 0 for r in self.degeneracies):
            raise InvalidModelError("degeneracies must be positive")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]], **kw) -> "DiscreteLevels":
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), **kw)

    @property
    def epsilon0(self) -> float:
        return min(self.energies)

    def __len__(self) -> int:
        return len(self.energies)


@dataclass(frozen=True)
class QuadraticClassical:
    """Classical rotor, energy ``0.5 * sum(I_i z_i**2)`` with Lebesgue measure on R^d."""

    inertias: tuple[float, ...]
    epsilon0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "inertias", tuple(float(i) for i in self.inertias))
        if len(self.inertias) not in (1, 2, 3):
            raise InvalidModelError("quadratic model needs 1, 2 or 3 inertias")
        if not all(i > 0 for i in self.inertias):
            raise InvalidModelError("inertias must be positive")

    @property
    def dim(self) -> int:
        return len(self.inertias)


@dataclass(frozen=True)
class Product:
    children: tuple["InternalModel", ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise InvalidModelError("product of zero models")


InternalModel = Union[Monoatomic, ContinuousPower, DiscreteLevels, QuadraticClassical, Product]


def product(children: Sequence[InternalModel]) -> Product:
    return Product(tuple(children))


def ground_energy(model: InternalModel) -> float:
    """Essential infimum of the energy function."""
    if isinstance(model, Product):
        return sum(ground_energy(c) for c in model.children)
    return model.epsilon0


# ---------------------------------------------------------------------------
# ladders and HF variants


def truncated_ladder(
    energy: Callable[[int], float],
    degeneracy: Callable[[int], float],
    kT_max: float,
    cap: int,
    tol: float = TAIL_TOL,
) -> tuple[list[float], list[float], float]:
    """Enumerate ``n = 0, 1, ...`` until the Gibbs tail at ``kT_max`` is below ``tol``.

    The ladder must have increasing energies with eventually decreasing
    Boltzmann terms; the tail is bounded by a geometric series on the last
    term ratio.  Returns energies, degeneracies and the certified bound.
    """
    e0 = energy(0)
    es, rs = [], []
    z = 0.0
    prev = None
    for n in range(cap + 1):
        e, r = energy(n), degeneracy(n)
        w = r * math.exp(-(e - e0) / kT_max)
        es.append(e)
        rs.append(r)
        z += w
        if prev is not None and prev > 0:
            ratio = w / prev
            if ratio < 1:
                bound = w * ratio / (1 - ratio) / z
                if bound < tol:
                    return es, rs, bound
        prev = w
    raise CapTooSmallError(f"ladder tail still above {tol} at cap {cap}")


def harmonic_levels(nu_e: float, constants: PhysicalConstants, t_max: float = DEFAULT_T_MAX) -> DiscreteLevels:
    hnu = constants.hc * nu_e
    kT = constants.k_B * t_max
    # exact geometric tail: exp(-N x) with x = hnu / kT
    n_top = math.ceil(-math.log(TAIL_TOL) * kT / hnu)
    es = [hnu * (n + 0.5) for n in range(n_top)]
    bound = math.exp(-n_top * hnu / kT)
    return DiscreteLevels(tuple(es), (1.0,) * n_top, tail_bound=bound, t_max=t_max,
                          labels=tuple(range(n_top)))


def morse_levels(sc: SpectroscopicConstants, constants: PhysicalConstants) -> DiscreteLevels:
    n_max = sc.n_max
    if n_max < 0 or sc.nu_e_x_e >= sc.nu_e / 2:
        raise InvalidModelError("no bound vibrational states (nu_e_x_e >= nu_e / 2)")
    hc = constants.hc
    es = [hc * sc.nu_e * (n + 0.5) - hc * sc.nu_e_x_e * (n + 0.5) ** 2 for n in range(n_max + 1)]
    return DiscreteLevels(tuple(es), (1.0,) * len(es), labels=tuple(range(n_max + 1)))


def rigid_rotor_levels(
    B_over_hc: float, constants: PhysicalConstants, t_max: float = DEFAULT_T_MAX, j_cap: int = DEFAULT_J_CAP
) -> DiscreteLevels:
    B = constants.hc * B_over_hc
    es, rs, bound = truncated_ladder(
        lambda J: B * J * (J + 1), lambda J: 2 * J + 1, constants.k_B * t_max, j_cap
    )
    return DiscreteLevels(tuple(es), tuple(rs), tail_bound=bound, t_max=t_max,
                          labels=tuple(range(len(es))))


def model4_energy(J, n, sc: SpectroscopicConstants, constants: PhysicalConstants):
    """Coupled rovibrational energy (J) of the improved quantum model."""
    hc = constants.hc
    J = np.asarray(J, dtype=float)
    n = np.asarray(n, dtype=float)
    jj = J * (J + 1)
    v = n + 0.5
    return (
        hc * (sc.B_over_hc - sc.alpha_over_hc * v) * jj
        - hc * sc.D_over_hc * jj**2
        + hc * sc.nu_e * v
        - hc * sc.nu_e_x_e * v**2
    )


def bound_states(
    sc: SpectroscopicConstants,
    j_cap: int = DEFAULT_J_CAP,
    n_cap: int = 100,
    constants: PhysicalConstants = PhysicalConstants(),
) -> set[tuple[int, int]]:
    """Pairs (J, n) with ``n <= n_max`` whose energy increases with J and with n.

    The J-condition is skipped at J = 0 and the n-condition at n = 0, so
    (0, 0) is always bound.  The difference condition alone admits
    ``n = floor(1 / (2 x_e))`` at small J; the Morse range ``n <= n_max``
    removes it.  Raises :class:`CapTooSmallError` when a bound state sits on
    a scan cap.
    """
    J, n = np.meshgrid(np.arange(j_cap + 1), np.arange(n_cap + 1), indexing="ij")
    e = model4_energy(J, n, sc, constants)
    ok = np.ones(e.shape, dtype=bool)
    ok[1:, :] &= e[1:, :] >= e[:-1, :]
    ok[:, 1:] &= e[:, 1:] >= e[:, :-1]
    ok &= n <= sc.n_max
    if ok[-1, :].any() or ok[:, -1].any():
        raise CapTooSmallError("bound-state set reaches the scan caps; raise j_cap / n_cap")
    return {(int(j), int(v)) for j, v in zip(*np.nonzero(ok))}


def model4_levels(
    sc: SpectroscopicConstants, constants: PhysicalConstants, j_cap: int = DEFAULT_J_CAP, n_cap: int = 100
) -> DiscreteLevels:
    states = sorted(bound_states(sc, j_cap, n_cap, constants))
    js = np.array([s[0] for s in states])
    ns = np.array([s[1] for s in states])
    es = model4_energy(js, ns, sc, constants)
    return DiscreteLevels(tuple(es), tuple(2.0 * js + 1), labels=tuple(states))


def build_hf_model(
    variant: int,
    sc: SpectroscopicConstants = HF_CONSTANTS,
    inertia: float | None = None,
    constants: PhysicalConstants = PhysicalConstants(),
    t_max: float = DEFAULT_T_MAX,
    j_cap: int = DEFAULT_J_CAP,
) -> InternalModel:
    """The four rotation-vibration models of a diatomic molecule.

    1: classical rotor x harmonic ladder; 2: classical rotor x Morse ladder;
    3: quantum rigid rotor x harmonic ladder; 4: coupled levels over the
    bound-state set.  ``inertia`` (kg m^2) is required for variants 1 and 2.
    """
    if variant in (1, 2):
        if inertia is None:
            raise InvalidModelError("variants 1 and 2 need the moment of inertia")
        rotor = QuadraticClassical((inertia, inertia))
        vib = harmonic_levels(sc.nu_e, constants, t_max) if variant == 1 else morse_levels(sc, constants)
        return Product((rotor, vib))
    if variant == 3:
        return Product((rigid_rotor_levels(sc.B_over_hc, constants, t_max, j_cap),
                        harmonic_levels(sc.nu_e, constants, t_max)))
    if variant == 4:
        if sc.nu_e_x_e >= sc.nu_e / 2:
            raise InvalidModelError("no bound vibrational states (nu_e_x_e >= nu_e / 2)")
        return model4_levels(sc, constants, j_cap)
    raise InvalidModelError(f"unknown HF variant {variant!r}")


def iter_states(model: InternalModel):
    """Yield ``(energy, weight)`` for a purely discrete model (products expanded)."""
    if isinstance(model, Monoatomic):
        yield model.epsilon0, 1.0
    elif isinstance(model, DiscreteLevels):
        yield from zip(model.energies, model.degeneracies)
    elif isinstance(model, Product):
        def rec(children):
            if not children:
                yield 0.0, 1.0
                return
            for e, r in iter_states(children[0]):
                for e2, r2 in rec(children[1:]):
                    yield e + e2, r * r2
        yield from rec(model.children)
    else:
        raise InvalidModelError(f"{type(model).__name__} has a continuum of states")
