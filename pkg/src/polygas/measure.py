"""Measures on the grounded energy half-line.

An :class:`EnergyMeasure` is a finite sum of Dirac atoms plus shifted power
densities ``c * (I - s)**a * 1{I >= s}``.  The class is closed under
convolution and admits closed-form exponential moments, which is all the
thermodynamics needs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

import numpy as np
from scipy.special import betaln, gammaln, logsumexp

from .errors import DomainError, InvalidModelError

#: relative distance under which atoms (and term shifts) are merged
MERGE_RTOL = 1e-12


@dataclass(frozen=True)
class Atom:
    location: float
    mass: float

    def __post_init__(self):
        if not (np.isfinite(self.location) and self.location >= 0):
            raise InvalidModelError(f"atom location must be finite and >= 0, got {self.location}")
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise InvalidModelError(f"atom mass must be finite and > 0, got {self.mass}")


@dataclass(frozen=True)
class ShiftedPowerTerm:
    """Density ``coefficient * (I - shift)**exponent`` on ``I >= shift``."""

    coefficient: float
    shift: float
    exponent: float

    def __post_init__(self):
        if not (np.isfinite(self.coefficient) and self.coefficient > 0):
            raise InvalidModelError(f"term coefficient must be > 0, got {self.coefficient}")
        if not (np.isfinite(self.shift) and self.shift >= 0):
            raise InvalidModelError(f"term shift must be >= 0, got {self.shift}")
        if not (np.isfinite(self.exponent) and self.exponent > -1):
            raise DomainError(f"term exponent must be > -1, got {self.exponent}")


@dataclass(frozen=True)
class EnergyMeasure:
    """Grounded measure on [0, inf) together with the ground energy it was shifted by.

    Build non-grounded data through :func:`ground`; the constructor only
    accepts measures whose support already starts at zero.
    """

    atoms: tuple[Atom, ...] = ()
    terms: tuple[ShiftedPowerTerm, ...] = ()
    ground_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.atoms and not self.terms:
            raise InvalidModelError("measure has no atoms and no terms (mu(E) must be nonzero)")
        if _support_infimum(self.atoms, self.terms) != 0.0:
            raise InvalidModelError("measure is not grounded; use ground() to shift it")

    # array views, used by every numerical routine
    @cached_property
    def atom_locations(self) -> np.ndarray:
        return np.array([a.location for a in self.atoms], dtype=float)

    @cached_property
    def atom_masses(self) -> np.ndarray:
        return np.array([a.mass for a in self.atoms], dtype=float)

    @cached_property
    def term_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        c = np.array([t.coefficient for t in self.terms], dtype=float)
        s = np.array([t.shift for t in self.terms], dtype=float)
        a = np.array([t.exponent for t in self.terms], dtype=float)
        return c, s, a

    @property
    def is_atomic(self) -> bool:
        return not self.terms

    @property
    def energy_scale(self) -> float:
        locs = [a.location for a in self.atoms] + [t.shift for t in self.terms]
        return max(locs) if locs else 0.0


def _support_infimum(atoms, terms) -> float:
    locs = [a.location for a in atoms] + [t.shift for t in terms]
    return min(locs)


def ground(
    raw: EnergyMeasure | tuple[float, Iterable[tuple[float, float]], Iterable[tuple[float, float, float]]],
) -> EnergyMeasure:
    """Shift a measure so that its support starts at zero.

    ``raw`` is either an :class:`EnergyMeasure` (returned unchanged) or a
    tuple ``(offset, atoms, terms)`` where atoms are ``(location, mass)`` and
    terms ``(coefficient, shift, exponent)`` pairs/triples on an arbitrary
    (possibly negative) energy axis.  The shift is added to the offset.
    """
    if isinstance(raw, EnergyMeasure):
        return raw
    offset, atoms, terms = raw
    atoms = [tuple(map(float, a)) for a in atoms]
    terms = [tuple(map(float, t)) for t in terms]
    if not atoms and not terms:
        raise InvalidModelError("empty measure: at least one atom or term is required")
    locs = [a[0] for a in atoms] + [t[1] for t in terms]
    if not np.all(np.isfinite(locs)):
        raise InvalidModelError("support infimum must be finite")
    base = min(locs)
    return EnergyMeasure(
        atoms=tuple(Atom(loc - base, m) for loc, m in atoms),
        terms=tuple(ShiftedPowerTerm(c, s - base, a) for c, s, a in terms),
        ground_offset=float(offset) + base,
    )


def _check_beta(beta):
    b = np.asarray(beta, dtype=float)
    if np.any(~(b > 0)):
        raise DomainError("beta must be > 0")
    return b


def laplace_moment(measure: EnergyMeasure, k: int, beta):
    """Closed-form ``∫ I**k exp(-beta I) dmu(I)``; ``beta`` may be an array."""
    if k < 0 or int(k) != k:
        raise DomainError("k must be a nonnegative integer")
    k = int(k)
    b = _check_beta(beta)
    out = np.zeros_like(b)
    bb = b[..., None]
    if measure.atoms:
        x, r = measure.atom_locations, measure.atom_masses
        out = out + np.sum(r * x**k * np.exp(-bb * x), axis=-1)
    if measure.terms:
        c, s, a = measure.term_arrays
        for j in range(k + 1):
            # binomial expansion of (s + x)**k around the shift
            with np.errstate(divide="ignore"):
                log_s = np.where(s > 0, np.log(np.where(s > 0, s, 1.0)), -np.inf)
            log_spow = 0.0 if k == j else (k - j) * log_s
            logs = (
                np.log(c) - bb * s + gammaln(a + j + 1) - (a + j + 1) * np.log(bb) + log_spow
            )
            out = out + comb(k, j) * np.sum(np.exp(logs), axis=-1)
    return out if out.ndim else float(out)


def gibbs_mixture(measure: EnergyMeasure, beta):
    """Gibbs measure at inverse temperature ``beta`` as a mixture.

    Returns ``(log_weight, mean, var)`` with one column per component: atoms
    are point masses, each term is ``shift + Gamma(exponent + 1, 1/beta)``.
    Weights are unnormalised (log partition function = logsumexp of them).
    """
    b = _check_beta(beta)[..., None]
    parts_w, parts_m, parts_v = [], [], []
    if measure.atoms:
        x, r = measure.atom_locations, measure.atom_masses
        parts_w.append(np.log(r) - b * x)
        parts_m.append(np.broadcast_to(x, parts_w[-1].shape))
        parts_v.append(np.zeros(parts_w[-1].shape))
    if measure.terms:
        c, s, a = measure.term_arrays
        parts_w.append(np.log(c) - b * s + gammaln(a + 1) - (a + 1) * np.log(b))
        parts_m.append(s + (a + 1) / b)
        parts_v.append((a + 1) / b**2 + 0 * s)
    lw = np.concatenate(parts_w, axis=-1)
    mean = np.concatenate(parts_m, axis=-1)
    var = np.concatenate(parts_v, axis=-1)
    return lw, mean, var


def gibbs_mean_var(measure: EnergyMeasure, beta):
    """Mean and variance of the grounded energy under the Gibbs measure, computed stably."""
    lw, m, v = gibbs_mixture(measure, beta)
    w = np.exp(lw - logsumexp(lw, axis=-1, keepdims=True))
    mean = np.sum(w * m, axis=-1)
    var = np.sum(w * (v + (m - mean[..., None]) ** 2), axis=-1)
    return mean, var


def log_partition(measure: EnergyMeasure, beta):
    lw, _, _ = gibbs_mixture(measure, beta)
    return logsumexp(lw, axis=-1)


def _merge_atoms(locs: np.ndarray, masses: np.ndarray) -> list[Atom]:
    order = np.argsort(locs, kind="stable")
    locs, masses = locs[order], masses[order]
    tol = MERGE_RTOL * (locs[-1] if locs.size else 0.0)
    out: list[tuple[float, float]] = []
    for x, r in zip(locs, masses):
        if out and x - out[-1][0] <= tol:
            x0, r0 = out[-1]
            # keep first moment, and keep an exact zero exactly at zero
            loc = 0.0 if x0 == 0.0 else (x0 * r0 + x * r) / (r0 + r)
            out[-1] = (loc, r0 + r)
        else:
            out.append((float(x), float(r)))
    return [Atom(x, r) for x, r in out]


def _merge_terms(terms: Sequence[tuple[float, float, float]]) -> list[ShiftedPowerTerm]:
    if not terms:
        return []
    scale = max(t[1] for t in terms)
    tol = MERGE_RTOL * scale
    ordered = sorted(terms, key=lambda t: (t[2], t[1]))
    out: list[list[float]] = []
    for c, s, a in ordered:
        if out and out[-1][2] == a and s - out[-1][1] <= tol:
            out[-1][0] += c
        else:
            out.append([c, s, a])
    out.sort(key=lambda t: (t[1], t[2]))
    return [ShiftedPowerTerm(c, s, a) for c, s, a in out]


def convolve(m1: EnergyMeasure, m2: EnergyMeasure) -> EnergyMeasure:
    """Convolution of two grounded measures (the image measure of a product model)."""
    atoms_loc, atoms_mass = [], []
    terms: list[tuple[float, float, float]] = []
    if m1.atoms and m2.atoms:
        loc = m1.atom_locations[:, None] + m2.atom_locations[None, :]
        mass = m1.atom_masses[:, None] * m2.atom_masses[None, :]
        atoms_loc.append(loc.ravel())
        atoms_mass.append(mass.ravel())
    for a, b in ((m1, m2), (m2, m1)):
        for atom in a.atoms:
            for t in b.terms:
                terms.append((atom.mass * t.coefficient, atom.location + t.shift, t.exponent))
    for t1 in m1.terms:
        for t2 in m2.terms:
            coef = t1.coefficient * t2.coefficient * np.exp(betaln(t1.exponent + 1, t2.exponent + 1))
            terms.append((coef, t1.shift + t2.shift, t1.exponent + t2.exponent + 1))
    atoms = (
        _merge_atoms(np.concatenate(atoms_loc), np.concatenate(atoms_mass)) if atoms_loc else []
    )
    return EnergyMeasure(
        atoms=tuple(atoms),
        terms=tuple(_merge_terms(terms)),
        ground_offset=m1.ground_offset + m2.ground_offset,
    )


def density_at(measure: EnergyMeasure, energy):
    """Absolutely continuous part of the measure evaluated at ``energy`` (>= 0)."""
    x = np.asarray(energy, dtype=float)
    if np.any(x < 0):
        raise DomainError("energy must be >= 0")
    if not measure.terms:
        out = np.zeros_like(x)
    else:
        c, s, a = measure.term_arrays
        d = x[..., None] - s
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = np.where(d >= 0, c * np.where(d >= 0, d, 1.0) ** a, 0.0)
        # (I - s)**a with a < 0 is infinite exactly at the shift
        vals = np.where((d == 0) & (a < 0), np.inf, vals)
        vals = np.where((d == 0) & (a == 0), c, vals)
        vals = np.where((d == 0) & (a > 0), 0.0, vals)
        out = np.sum(vals, axis=-1)
    return out if out.ndim else float(out)


def interval_moments(measure: EnergyMeasure, lo: float, hi: float) -> tuple[float, float]:
    """Mass and first moment of the measure restricted to ``[lo, hi)``.

    ``hi`` may be ``inf``; the mass is then infinite as soon as a term is present.
    """
    mass = first = 0.0
    if measure.atoms:
        x, r = measure.atom_locations, measure.atom_masses
        sel = (x >= lo) & (x < hi)
        mass += float(np.sum(r[sel]))
        first += float(np.sum(r[sel] * x[sel]))
    for t in measure.terms:
        u0 = max(lo - t.shift, 0.0)
        u1 = hi - t.shift
        if u1 <= u0:
            continue
        if np.isinf(u1):
            return float("inf"), float("inf")
        a, c, s = t.exponent, t.coefficient, t.shift
        m = c * (u1 ** (a + 1) - u0 ** (a + 1)) / (a + 1)
        mass += m
        first += c * (u1 ** (a + 2) - u0 ** (a + 2)) / (a + 2) + s * m
    return mass, first


def as_dict(measure: EnergyMeasure) -> dict:
    return {
        "groundOffset": measure.ground_offset,
        "atoms": [[a.location, a.mass] for a in measure.atoms],
        "terms": [[t.coefficient, t.shift, t.exponent] for t in measure.terms],
    }


def from_dict(doc: dict) -> EnergyMeasure:
    return ground((doc.get("groundOffset", 0.0), doc.get("atoms", []), doc.get("terms", [])))
