import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polygas.errors import DomainError, InvalidModelError
from polygas.measure import (
    Atom,
    EnergyMeasure,
    ShiftedPowerTerm,
    as_dict,
    convolve,
    density_at,
    from_dict,
    gibbs_mean_var,
    ground,
    interval_moments,
    laplace_moment,
    log_partition,
)

from oracles import brute_convolution_density, quad_moment


def atoms_only(*pairs, offset=0.0):
    return ground((offset, pairs, []))


def terms_only(*triples, offset=0.0):
    return ground((offset, [], triples))


# -- laplace_moment

def test_point_mass_at_zero_has_unit_partition_function():
    m = atoms_only((0.0, 1.0))
    for beta in (1e-3, 1.0, 1e4):
        assert laplace_moment(m, 0, beta) == 1.0


def test_flat_ramp_moment_closed_form():
    m = terms_only((1.0, 0.0, 1.0))
    assert laplace_moment(m, 0, 2.0) == pytest.approx(0.25, rel=1e-14)
    assert quad_moment([], [(1.0, 0.0, 1.0)], 0, 2.0) == pytest.approx(0.25, rel=1e-12)


def test_two_atoms_first_moment():
    E = 3.7
    m = atoms_only((E, 1.0), (0.0, 1.0))
    assert laplace_moment(m, 1, 1 / E) == pytest.approx(E * math.exp(-1), rel=1e-14)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_moments_match_quadrature(k):
    atoms = [(0.0, 2.0), (0.4, 0.5)]
    terms = [(1.3, 0.2, -0.5), (0.7, 0.0, 2.5), (2.0, 1.1, 0.0)]
    m = ground((0.0, atoms, terms))
    for beta in (0.3, 1.0, 4.0):
        assert laplace_moment(m, k, beta) == pytest.approx(quad_moment(atoms, terms, k, beta), rel=1e-10)


def test_laplace_moment_vectorised():
    m = terms_only((1.0, 0.0, 0.5))
    b = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(laplace_moment(m, 1, b), [laplace_moment(m, 1, x) for x in b], rtol=1e-15)


@pytest.mark.parametrize("beta", [0.0, -1.0, np.nan])
def test_nonpositive_beta_rejected(beta):
    with pytest.raises(DomainError):
        laplace_moment(atoms_only((0.0, 1.0)), 0, beta)


def test_negative_k_rejected():
    with pytest.raises(DomainError):
        laplace_moment(atoms_only((0.0, 1.0)), -1, 1.0)


def test_partition_function_positive_and_decreasing():
    m = ground((0.0, [(0.0, 1.0), (1.0, 3.0)], [(0.5, 0.3, 1.5)]))
    betas = np.geomspace(1e-3, 30, 200)
    z = laplace_moment(m, 0, betas)
    assert np.all(z > 0)
    assert np.all(np.diff(z) < 0)


def test_gibbs_mean_var_agree_with_moments():
    m = ground((0.0, [(0.0, 1.0), (0.8, 2.0)], [(1.0, 0.1, 0.5)]))
    beta = 1.7
    z, m1, m2 = (laplace_moment(m, k, beta) for k in range(3))
    mean, var = gibbs_mean_var(m, beta)
    assert mean == pytest.approx(m1 / z, rel=1e-13)
    assert var == pytest.approx(m2 / z - (m1 / z) ** 2, rel=1e-10)
    assert log_partition(m, beta) == pytest.approx(math.log(z), rel=1e-14)


def test_huge_exponents_do_not_overflow():
    m = terms_only((1.0, 0.0, 300.0))
    assert np.isfinite(log_partition(m, 1.0))
    assert gibbs_mean_var(m, 1.0)[0] == pytest.approx(301.0)


# -- ground

def test_ground_shifts_atoms_to_zero():
    m = atoms_only((1.0, 1.0), (2.0, 1.0))
    assert [a.location for a in m.atoms] == [0.0, 1.0]
    assert m.ground_offset == 1.0


def test_ground_is_idempotent():
    m = ground((0.5, [(0.2, 1.0)], [(2.0, 0.7, 1.0)]))
    assert ground(m) == m
    again = ground((m.ground_offset, [(a.location, a.mass) for a in m.atoms],
                    [(t.coefficient, t.shift, t.exponent) for t in m.terms]))
    assert again == m


def test_ground_term_alone():
    m = terms_only((2.0, 0.3, 1.5))
    assert m.terms[0] == ShiftedPowerTerm(2.0, 0.0, 1.5)
    assert m.ground_offset == 0.3


def test_ground_empty_measure_rejected():
    with pytest.raises(InvalidModelError):
        ground((0.0, [], []))


def test_constructor_rejects_ungrounded():
    with pytest.raises(InvalidModelError):
        EnergyMeasure(atoms=(Atom(0.5, 1.0),))


def test_term_exponent_minus_one_rejected():
    with pytest.raises(DomainError):
        ShiftedPowerTerm(1.0, 0.0, -1.0)


@pytest.mark.parametrize("bad", [(-0.1, 1.0), (0.0, 0.0), (0.0, -1.0), (np.inf, 1.0)])
def test_atom_invariants(bad):
    with pytest.raises(InvalidModelError):
        Atom(*bad)


# -- convolution

def test_atom_atom_convolution():
    a = atoms_only((0.0, 2.0), (1.5, 1.0))
    b = atoms_only((0.0, 3.0), (0.25, 0.5))
    c = convolve(a, b)
    got = sorted((x.location, x.mass) for x in c.atoms)
    assert got == [(0.0, 6.0), (0.25, 1.0), (1.5, 3.0), (1.75, 0.5)]


def test_atom_shifts_term():
    a = atoms_only((0.0, 1.0), (0.7, 1.0))
    b = terms_only((2.0, 0.0, 1.5))
    c = convolve(a, b)
    assert sorted((t.coefficient, t.shift, t.exponent) for t in c.terms) == [(2.0, 0.0, 1.5), (2.0, 0.7, 1.5)]
    assert not c.atoms


def test_uniform_convolved_with_uniform_is_ramp():
    u = terms_only((1.0, 0.0, 0.0))
    c = convolve(u, u)
    assert c.terms == (ShiftedPowerTerm(1.0, 0.0, 1.0),)


def test_offsets_add():
    a = atoms_only((2.0, 1.0), offset=1.0)
    b = terms_only((1.0, 0.5, 0.0), offset=-0.25)
    assert convolve(a, b).ground_offset == pytest.approx(3.0 + 0.25)


def test_near_degenerate_atoms_merge():
    a = atoms_only((0.0, 1.0), (1.0, 1.0))
    b = atoms_only((0.0, 1.0), (1.0 + 1e-15, 1.0))
    c = convolve(a, b)
    assert len(c.atoms) == 3
    assert sum(x.mass for x in c.atoms) == pytest.approx(4.0)


@st.composite
def measures(draw):
    atoms = draw(st.lists(st.tuples(st.floats(0, 3), st.floats(0.1, 3)), max_size=3))
    terms = draw(st.lists(st.tuples(st.floats(0.1, 3), st.floats(0, 2), st.floats(-0.9, 3)), max_size=2))
    if not atoms and not terms:
        atoms = [(0.0, 1.0)]
    return ground((draw(st.floats(-5, 5)), atoms, terms))


@settings(max_examples=60, deadline=None)
@given(measures(), measures(), st.floats(0.2, 5.0))
def test_laplace_transform_factorises(a, b, beta):
    za, zb = laplace_moment(a, 0, beta), laplace_moment(b, 0, beta)
    assert laplace_moment(convolve(a, b), 0, beta) == pytest.approx(za * zb, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(measures(), measures(), measures(), st.floats(0.2, 5.0))
def test_convolution_commutative_and_associative(a, b, c, beta):
    for k in (0, 1, 2):
        ab = laplace_moment(convolve(a, b), k, beta)
        ba = laplace_moment(convolve(b, a), k, beta)
        assert ab == pytest.approx(ba, rel=1e-12)
        left = laplace_moment(convolve(convolve(a, b), c), k, beta)
        right = laplace_moment(convolve(a, convolve(b, c)), k, beta)
        assert left == pytest.approx(right, rel=1e-11)


@settings(max_examples=40, deadline=None)
@given(measures(), st.floats(0.05, 20.0))
def test_partition_function_positive(m, beta):
    # d ln Z / d beta = -<I>, which is negative unless mu is a point mass at 0
    assert laplace_moment(m, 0, beta) > 0
    assert laplace_moment(m, 0, beta) >= laplace_moment(m, 0, beta * 1.5)
    point_mass = m.is_atomic and not np.any(m.atom_locations > 0)
    if not point_mass:
        assert gibbs_mean_var(m, beta)[0] > 0


# -- densities, intervals, serialisation

def test_density_at_flat_and_ramp():
    assert density_at(terms_only((1.0, 0.0, 0.0)), 0.7) == 1.0
    assert density_at(terms_only((1.0, 0.0, 1.0)), 2.0) == 2.0
    assert density_at(atoms_only((0.0, 1.0)), 0.3) == 0.0
    with pytest.raises(DomainError):
        density_at(terms_only((1.0, 0.0, 0.0)), -0.1)


def test_interval_moments_ramp():
    r, first = interval_moments(terms_only((1.0, 0.0, 1.0)), 0.0, 1.0)
    assert r == pytest.approx(0.5)
    assert first == pytest.approx(1 / 3)


def test_interval_moments_infinite_tail():
    r, _ = interval_moments(terms_only((1.0, 0.0, 0.0)), 2.0, math.inf)
    assert math.isinf(r)


def test_dict_round_trip():
    m = ground((1.5, [(0.0, 2.0), (0.4, 0.5)], [(1.3, 0.2, -0.5)]))
    assert from_dict(as_dict(m)) == m


@pytest.mark.parametrize("a1, a2", [(-0.5, -0.5), (0.0, 1.5), (2.0, -0.3)])
def test_convolution_density_matches_quadrature(a1, a2):
    atoms1, terms1 = [(0.0, 1.0), (0.7, 2.0)], [(1.3, 0.2, a1)]
    atoms2, terms2 = [(0.4, 0.5)], [(0.8, 0.0, a2)]
    ab = convolve(ground((0.0, atoms1, terms1)), ground((0.0, atoms2, terms2)))
    x = np.linspace(0.05, 3.0, 40)
    np.testing.assert_allclose(density_at(ab, x), brute_convolution_density(atoms1, terms1, atoms2, terms2, x),
                               rtol=1e-10)
