"""Reduction of state-based models to a measure on the energy half-line, and binning."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce as _fold

import numpy as np
from scipy.special import gammainc, gammaincc, gammaln

from . import measure as ms
from .errors import InvalidBinningError, UnsupportedModelError
from .measure import EnergyMeasure, density_at, interval_moments
from .models import (
    ContinuousPower,
    DiscreteLevels,
    InternalModel,
    Monoatomic,
    Product,
    QuadraticClassical,
)

__all__ = ["reduce", "density_at", "BinningSpec", "bin_measure", "uniform_edges", "quantile_edges",
           "quadratic_constant"]

#: relative Gibbs tail allowed beyond the last edge of a closed binning
BIN_TAIL_TOL = 1e-12


def sphere_area(d: int) -> float:
    """(d-1)-dimensional measure of the unit sphere in R^d."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


def quadratic_constant(inertias) -> float:
    """Density prefactor of the reduced quadratic model, ``C_d`` for equal inertias."""
    d = len(inertias)
    return 2 ** (d / 2 - 1) * sphere_area(d) * math.prod(i ** -0.5 for i in inertias)


def reduce(model: InternalModel) -> EnergyMeasure:
    """Image measure of the model's internal-state measure under the grounded energy."""
    if isinstance(model, Monoatomic):
        return ms.ground((model.epsilon0, [(0.0, 1.0)], []))
    if isinstance(model, ContinuousPower):
        return ms.ground((model.epsilon0, [], [(model.coefficient, 0.0, model.alpha)]))
    if isinstance(model, DiscreteLevels):
        return ms.ground((0.0, zip(model.energies, model.degeneracies), []))
    if isinstance(model, QuadraticClassical):
        ins = model.inertias
        if model.dim == 3 and len(set(ins)) > 1:
            raise UnsupportedModelError("reduction of triaxial rotors (three distinct inertias)")
        c = quadratic_constant(ins)
        return ms.ground((model.epsilon0, [], [(c, 0.0, model.dim / 2 - 1)]))
    if isinstance(model, Product):
        return _fold(ms.convolve, (reduce(c) for c in model.children))
    raise TypeError(f"not an internal model: {model!r}")


@dataclass(frozen=True)
class BinningSpec:
    edges: tuple[float, ...]
    open_tail: bool = False

    def __post_init__(self):
        e = tuple(float(x) for x in self.edges)
        object.__setattr__(self, "edges", e)
        if len(e) < 1 or (len(e) < 2 and not self.open_tail):
            raise InvalidBinningError("need at least one bin")
        if e[0] != 0.0:
            raise InvalidBinningError("edges must start at 0")
        if any(b <= a for a, b in zip(e, e[1:])):
            raise InvalidBinningError("edges must be strictly increasing")

    def intervals(self):
        e = self.edges
        pairs = list(zip(e, e[1:]))
        if self.open_tail:
            pairs.append((e[-1], math.inf))
        return pairs


def uniform_edges(kT_ref: float, n_bins: int, cap_in_kT: float = 40.0) -> BinningSpec:
    """``n_bins`` equal bins on ``[0, cap_in_kT * kT_ref]``."""
    return BinningSpec(tuple(np.linspace(0.0, cap_in_kT * kT_ref, n_bins + 1)))


def quantile_edges(measure: EnergyMeasure, kT_ref: float, n_bins: int, cap_in_kT: float = 40.0,
                   grid: int = 20001) -> BinningSpec:
    """Edges at equal-probability quantiles of the Gibbs measure at ``kT_ref``.

    Greedy heuristic toward small Wasserstein distance between the Gibbs
    laws of the measure and its binned version; no optimality claimed.
    """
    top = cap_in_kT * kT_ref
    x = np.linspace(0.0, top, grid)
    cdf = _gibbs_below(measure, x, kT_ref)
    cdf = cdf / cdf[-1]
    qs = np.interp(np.linspace(0, 1, n_bins + 1)[1:-1], cdf, x)
    edges = np.unique(np.concatenate([[0.0], qs, [top]]))
    return BinningSpec(tuple(edges))


def _gibbs_below(measure: EnergyMeasure, x, kT: float, upper: bool = False):
    """Unnormalised Gibbs mass of ``[0, x)`` (or of ``[x, inf)`` when ``upper``)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    if measure.atoms:
        loc, r = measure.atom_locations, measure.atom_masses
        w = r * np.exp(-loc / kT)
        sel = loc >= x[..., None] if upper else loc < x[..., None]
        out = out + np.sum(np.where(sel, w, 0.0), axis=-1)
    if measure.terms:
        c, s, a = measure.term_arrays
        a1 = a + 1
        full = np.exp(np.log(c) - s / kT + gammaln(a1) + a1 * np.log(kT))
        u = np.clip((x[..., None] - s) / kT, 0.0, None)
        frac = gammaincc(a1, u) if upper else gammainc(a1, u)
        out = out + np.sum(full * frac, axis=-1)
    return out


def bin_measure(measure: EnergyMeasure, spec: BinningSpec, kT_ref: float | None = None) -> DiscreteLevels:
    """Replace the measure by one Dirac level per nonempty bin.

    Level energy = ground offset + bin mean of the grounded energy; level
    degeneracy = bin mass.  For a closed binning and a given ``kT_ref``,
    the Gibbs mass beyond the last edge must be below 1e-12 of the total.
    """
    levels = []
    for lo, hi in spec.intervals():
        r, first = interval_moments(measure, lo, hi)
        if math.isinf(r):
            raise InvalidBinningError("open tail bin carries infinite mass (density term present)")
        if r > 0:
            levels.append((measure.ground_offset + first / r, r))
    if not levels:
        raise InvalidBinningError("all bins are empty")
    if kT_ref is not None and not spec.open_tail:
        tail = float(_gibbs_below(measure, spec.edges[-1], kT_ref, upper=True))
        total = float(_gibbs_below(measure, np.inf, kT_ref))
        if tail > BIN_TAIL_TOL * total:
            raise InvalidBinningError(
                f"Gibbs mass beyond the last edge is {tail / total:.3g} of the total at kT_ref"
            )
    return DiscreteLevels.from_pairs(levels)
