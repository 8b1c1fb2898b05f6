"""Space-homogeneous DSMC with discrete internal levels.

Collisions are sampled with a no-time-counter scheme.  A candidate pair
``(i, j)`` proposes post-collision levels ``(k, l)`` with probability
``r_k r_l / R^2`` (``R`` = total degeneracy) and is accepted with probability
``C R^2 sqrt(Delta_kl) / M``, where the majorant

    M = C R^2 sqrt(rmax^2 + 2 (eps_top - eps_0) / m)

bounds the rate of every pair: ``rmax`` is the largest distance of a
velocity from the (conserved) mean velocity, so ``|g|^2 / 4 <= rmax^2``.
Candidates are processed in rounds of disjoint random pairs, which makes a
whole round one vectorised update.  ``rmax`` is refreshed between rounds and
the number of remaining candidates rescaled with the majorant.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .collision import KernelSpec, random_unit_vectors, reflect
from .errors import DomainError, MajorantViolationError
from .models import DiscreteLevels, PhysicalConstants
from .thermo import ThermoModel, theta_inv

__all__ = [
    "make_rng",
    "Particle",
    "Ensemble",
    "init_ensemble",
    "step",
    "estimate_state",
    "HGrid",
    "estimate_H",
    "RelaxReport",
    "relax",
    "INIT_KINDS",
]

INIT_KINDS = ("maxwellian", "twobeam", "inverted", "twobeam+inverted")
#: guard against unit mix-ups that would ask for astronomically many candidates
MAX_CANDIDATES_PER_PARTICLE = 1e4


def make_rng(seed: int | np.random.SeedSequence | None = None, worker: int = 0) -> np.random.Generator:
    """Counter-based (Philox) stream ``worker`` derived from a master seed."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    child = ss.spawn(worker + 1)[worker]
    return np.random.Generator(np.random.Philox(child))


@dataclass(frozen=True)
class Particle:
    v: np.ndarray
    level: int


@dataclass
class Ensemble:
    """Simulator particles: velocities ``v`` (N x 3) and level indices."""

    v: np.ndarray
    level: np.ndarray
    model: DiscreteLevels
    constants: PhysicalConstants
    kernel: KernelSpec = KernelSpec()
    weight: float = 1.0
    volume: float = 1.0
    track_transitions: bool = False
    thermo: ThermoModel = field(init=False, repr=False)
    eps_bar: np.ndarray = field(init=False, repr=False)
    transitions: np.ndarray | None = field(init=False, repr=False, default=None)
    _remainder: float = field(init=False, repr=False, default=0.0)

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.level = np.asarray(self.level, dtype=np.intp)
        n = len(self.level)
        if n < 2 or self.v.shape != (n, 3):
            raise DomainError("need N >= 2 particles with 3D velocities")
        L = len(self.model)
        if np.any((self.level < 0) | (self.level >= L)):
            raise DomainError("level index out of range")
        if not (self.weight > 0 and self.volume > 0):
            raise DomainError("weight and volume must be positive")
        e = np.asarray(self.model.energies, dtype=float)
        self.eps_bar = e - e.min()
        self.thermo = ThermoModel.from_model(self.model, self.constants)
        if self.track_transitions:
            self.transitions = np.zeros((L, L, L, L), dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.level)

    @property
    def mass(self) -> float:
        return self.constants.mass

    @property
    def particles(self) -> list[Particle]:
        return [Particle(v.copy(), int(k)) for v, k in zip(self.v, self.level)]

    def level_histogram(self) -> np.ndarray:
        return np.bincount(self.level, minlength=len(self.model)) / self.n

    def total_momentum(self) -> np.ndarray:
        return self.mass * self.v.sum(axis=0)

    def total_energy(self) -> float:
        """Kinetic plus grounded internal energy of all simulator particles."""
        return 0.5 * self.mass * float(np.sum(self.v * self.v)) + float(self.eps_bar[self.level].sum())


def _gibbs_level_probs(model: DiscreteLevels, kT: float, inverted: bool = False) -> np.ndarray:
    e = np.asarray(model.energies, dtype=float)
    e = e - e.min()
    r = np.asarray(model.degeneracies, dtype=float)
    x = (e - e.max()) / kT if inverted else -e / kT
    lw = np.log(r) + x
    p = np.exp(lw - lw.max())
    return p / p.sum()


def init_ensemble(
    model: DiscreteLevels,
    N: int,
    rho: float,
    u,
    T: float,
    rng: np.random.Generator,
    kind: str = "maxwellian",
    constants: PhysicalConstants = PhysicalConstants(),
    kernel: KernelSpec = KernelSpec(),
    weight: float = 1.0,
    beam_fraction: float = 0.25,
    track_transitions: bool = False,
) -> Ensemble:
    """Sample an initial ensemble.

    ``maxwellian``: Gaussian velocities with variance ``kT/m`` per axis and
    Gibbs levels.  ``twobeam``: two counter-streaming beams along x, each of
    temperature ``beam_fraction * T``, with the same translational energy as
    the Maxwellian.  ``inverted``: level populations ``r_k exp((eps_k - eps_max)/kT)``.
    ``twobeam+inverted`` combines both.  The volume is set so that the mass
    density is ``rho``.
    """
    if kind not in INIT_KINDS:
        raise DomainError(f"unknown initial condition {kind!r}")
    if N < 2 or not T > 0 or not rho > 0:
        raise DomainError("need N >= 2, T > 0 and rho > 0")
    m, kT = constants.mass, constants.k_B * T
    u = np.broadcast_to(np.asarray(u, dtype=float), (3,))
    if kind.startswith("twobeam"):
        if not 0 < beam_fraction < 1:
            raise DomainError("beam_fraction must lie in (0, 1)")
        v = rng.standard_normal((N, 3)) * math.sqrt(beam_fraction * kT / m)
        a = math.sqrt(3.0 * kT * (1.0 - beam_fraction) / m)
        sign = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
        v[:, 0] += sign * a
        v += u
    else:
        v = u + rng.standard_normal((N, 3)) * math.sqrt(kT / m)
    p = _gibbs_level_probs(model, kT, inverted=kind.endswith("inverted"))
    level = rng.choice(len(p), size=N, p=p)
    volume = m * N * weight / rho
    return Ensemble(v, level, model, constants, kernel, weight, volume, track_transitions)


def _majorant(ens: Ensemble, centre: np.ndarray) -> tuple[float, float]:
    d = ens.v - centre
    rmax2 = float(np.max(np.sum(d * d, axis=1)))
    R = float(np.sum(ens.model.degeneracies))
    top = float(ens.eps_bar.max())
    return ens.kernel.C * R * R * math.sqrt(rmax2 + 2.0 * top / ens.mass), R


def step(ens: Ensemble, dt: float, rng: np.random.Generator) -> int:
    """Advance the ensemble by ``dt``; returns the number of accepted collisions."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    N, m = ens.n, ens.mass
    r = np.asarray(ens.model.degeneracies, dtype=float)
    cdf = np.cumsum(r / r.sum())
    centre = ens.v.mean(axis=0)
    M, R = _majorant(ens, centre)
    expected = 0.5 * N * (N - 1) * ens.weight * M * dt / ens.volume + ens._remainder
    if not expected <= MAX_CANDIDATES_PER_PARTICLE * N:
        raise DomainError(f"{expected:.3g} candidate pairs in one step; dt is far too large "
                          "for the collision rate (check units)")
    remaining = float(expected)
    accepted = 0
    half = N // 2
    while remaining >= 1.0:
        n = min(int(remaining), half)
        perm = rng.permutation(N)
        i, j = perm[:n], perm[half:half + n]
        k = np.minimum(np.searchsorted(cdf, rng.random(n), side="right"), len(r) - 1)
        l = np.minimum(np.searchsorted(cdf, rng.random(n), side="right"), len(r) - 1)
        g = ens.v[i] - ens.v[j]
        g2 = np.sum(g * g, axis=1)
        released = ens.eps_bar[ens.level[i]] + ens.eps_bar[ens.level[j]] - ens.eps_bar[k] - ens.eps_bar[l]
        delta = 0.25 * g2 + released / m
        rate = ens.kernel.C * R * R * np.sqrt(np.maximum(delta, 0.0))
        prob = rate / M
        if np.any(prob > 1.0 + 1e-12):
            raise MajorantViolationError(f"acceptance probability {prob.max():.6g} > 1")
        acc = (rng.random(n) < prob) & (delta > 0) & (g2 > 0)
        if np.any(acc):
            ia, ja = i[acc], j[acc]
            ga = g[acc]
            gn = np.sqrt(g2[acc])[:, None]
            omega = random_unit_vectors(rng, int(acc.sum()))
            hv = np.sqrt(delta[acc])[:, None] * reflect(ga / gn, omega)
            c = 0.5 * (ens.v[ia] + ens.v[ja])
            ens.v[ia] = c + hv
            ens.v[ja] = c - hv
            if ens.transitions is not None:
                np.add.at(ens.transitions, (ens.level[ia], ens.level[ja], k[acc], l[acc]), 1)
            ens.level[ia] = k[acc]
            ens.level[ja] = l[acc]
            accepted += int(acc.sum())
        remaining -= n
        M_new, _ = _majorant(ens, centre)
        if M_new != M:
            remaining *= M_new / M
            M = M_new
    ens._remainder = remaining
    return accepted


def estimate_state(ens: Ensemble) -> tuple[float, np.ndarray, float]:
    """``(rho, u, T)`` with ``T = Theta^-1`` of the mean peculiar-plus-internal energy per particle."""
    rho = ens.mass * ens.n * ens.weight / ens.volume
    u = ens.v.mean(axis=0)
    d = ens.v - u
    e = 0.5 * ens.mass * np.mean(np.sum(d * d, axis=1)) + np.mean(ens.eps_bar[ens.level])
    return rho, u, theta_inv(ens.thermo, max(float(e), 0.0))


@dataclass(frozen=True)
class HGrid:
    """Cubic velocity grid: ``bins`` per axis on ``centre +- half_width``."""

    centre: tuple[float, float, float]
    half_width: float
    bins: int = 32

    @classmethod
    def thermal(cls, u, T: float, constants: PhysicalConstants, bins: int = 32, n_sigma: float = 5.0) -> "HGrid":
        s = math.sqrt(constants.k_B * T / constants.mass)
        return cls(tuple(float(x) for x in np.broadcast_to(u, (3,))), n_sigma * s, bins)

    @property
    def cell_volume(self) -> float:
        return (2.0 * self.half_width / self.bins) ** 3


def _h_counts(ens: Ensemble, grid: HGrid) -> tuple[np.ndarray, int]:
    b = grid.bins
    x = (ens.v - np.asarray(grid.centre)) / (2 * grid.half_width) + 0.5
    idx = np.floor(x * b).astype(np.int64)
    inside = np.all((idx >= 0) & (idx < b), axis=1)
    flat = ((idx[inside, 0] * b + idx[inside, 1]) * b + idx[inside, 2]) * len(ens.model) + ens.level[inside]
    counts = np.bincount(flat, minlength=b**3 * len(ens.model))
    return counts, int((~inside).sum())


def _h_from_counts(counts, N, dv, r_flat):
    c = counts.astype(float)
    nz = c > 0
    return float(np.sum(c[nz] / N * np.log(c[nz] / (N * dv * r_flat[nz]))))


def estimate_H(ens: Ensemble, grid: HGrid, rng: np.random.Generator | None = None,
               n_boot: int = 0) -> tuple[float, float, int]:
    """Histogram estimate of ``H = sum f ln f dv dmu``.

    ``f = count / (N dv r_level)`` per velocity cell and level.  Returns
    ``(H, bootstrap standard error, overflow count)``; the error is 0 when
    ``n_boot`` is 0.  Particles outside the grid are not counted.
    """
    counts, overflow = _h_counts(ens, grid)
    N, dv = ens.n, grid.cell_volume
    r = np.asarray(ens.model.degeneracies, dtype=float)
    r_flat = np.tile(r, grid.bins**3)
    H = _h_from_counts(counts, N, dv, r_flat)
    se = 0.0
    if n_boot:
        rng = rng if rng is not None else make_rng(0)
        nz = counts > 0
        p = counts[nz] / N
        extra = overflow / N
        hs = []
        for _ in range(n_boot):
            # resampling particles, overflow included as its own category
            draw = rng.multinomial(N, np.append(p, extra) / (p.sum() + extra))
            hs.append(_h_from_counts(draw[:-1], N, dv, r_flat[nz]))
        se = float(np.std(hs, ddof=1))
    return H, se, overflow


@dataclass
class RelaxReport:
    t: list[float] = field(default_factory=list)
    rho: list[float] = field(default_factory=list)
    u: list[np.ndarray] = field(default_factory=list)
    T_est: list[float] = field(default_factory=list)
    H_est: list[float] = field(default_factory=list)
    H_se: list[float] = field(default_factory=list)
    level_hist: list[np.ndarray] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    momentum: list[np.ndarray] = field(default_factory=list)

    def record(self, t: float, ens: Ensemble, grid: HGrid, rng, n_boot: int):
        if self.t and not t > self.t[-1]:
            raise DomainError("report times must increase")
        rho, u, T = estimate_state(ens)
        H, se, _ = estimate_H(ens, grid, rng, n_boot)
        self.t.append(t)
        self.rho.append(rho)
        self.u.append(u)
        self.T_est.append(T)
        self.H_est.append(H)
        self.H_se.append(se)
        self.level_hist.append(ens.level_histogram())
        self.energy.append(ens.total_energy())
        self.momentum.append(ens.total_momentum())

    def write_csv(self, dest) -> None:
        """Write the series to a path or an open text stream."""
        if hasattr(dest, "write"):
            self._write(dest)
        else:
            with open(dest, "w", newline="") as fh:
                self._write(fh)

    def _write(self, fh) -> None:
        L = len(self.level_hist[0]) if self.level_hist else 0
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "rho", "ux", "uy", "uz", "T_est", "H_est"] + [f"level_{k}" for k in range(L)])
        for t, rho, u, T, H, h in zip(self.t, self.rho, self.u, self.T_est, self.H_est, self.level_hist):
            w.writerow([format(float(x), ".17g") for x in (t, rho, *u, T, H, *h)])


def relax(ens: Ensemble, steps: int, dt: float, rng: np.random.Generator, grid: HGrid | None = None,
          record_every: int = 1, n_boot: int = 0) -> RelaxReport:
    """Run ``steps`` collision steps, recording moments and H along the way."""
    if grid is None:
        _, u, T = estimate_state(ens)
        grid = HGrid.thermal(u, T, ens.constants)
    report = RelaxReport()
    report.record(0.0, ens, grid, rng, n_boot)
    for s in range(1, steps + 1):
        step(ens, dt, rng)
        if s % record_every == 0 or s == steps:
            report.record(s * dt, ens, grid, rng, n_boot)
    return report
