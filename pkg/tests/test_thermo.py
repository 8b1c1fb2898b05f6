import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polygas.errors import DomainError
from polygas.measure import ground, laplace_moment
from polygas.models import (
    HF_CONSTANTS,
    ContinuousPower,
    DiscreteLevels,
    Monoatomic,
    PhysicalConstants,
    Product,
    QuadraticClassical,
    build_hf_model,
    morse_levels,
)
from polygas.thermo import (
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

from oracles import direct_gibbs, harmonic_delta, two_level_delta

RED = PhysicalConstants.reduced()
#: hc nu_e / k_B for nu_e = 4138.39 cm^-1 with exact SI constants
T_VIB = 5954.219842093506


def two_level(E=1.0):
    return ThermoModel(ground((0.0, [(0.0, 1.0), (E, 1.0)], [])), RED)


def test_t_vib(si):
    assert si.hc * 4138.39 / si.k_B == pytest.approx(T_VIB, rel=1e-13)


# -- partition function

def test_monoatomic_Z():
    tm = ThermoModel.from_model(Monoatomic(1.0), RED)
    assert partition_Z(tm, 0.1) == partition_Z(tm, 10.0) == 1.0


def test_harmonic_ladder_Z(si):
    tm = ThermoModel.from_model(build_hf_model(1, inertia=1.0).children[1], si)
    for T in (300.0, 3000.0, 1e4):
        beta = 1 / (si.k_B * T)
        x = si.hc * 4138.39 * beta
        assert partition_Z(tm, beta) == pytest.approx(1 / (1 - math.exp(-x)), rel=1e-13)


def test_power_term_Z():
    tm = ThermoModel(ground((0.0, [], [(2.0, 0.0, 1.5)])), RED)
    assert partition_Z(tm, 0.7) == pytest.approx(2.0 * math.gamma(2.5) / 0.7**2.5, rel=1e-14)


def test_Z_domain():
    with pytest.raises(DomainError):
        partition_Z(two_level(), 0.0)


# -- delta, D, c_V

def test_monoatomic_delta_cv():
    tm = ThermoModel.from_model(Monoatomic(), RED)
    assert delta_dof(tm, 3.0) == 0.0
    assert heat_capacity(tm, 3.0) == (0.0, 1.5)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
def test_continuous_power_delta_equals_D(alpha):
    tm = ThermoModel.from_model(ContinuousPower(1.0, alpha), RED)
    for T in (0.01, 1.0, 100.0):
        assert delta_dof(tm, T) == pytest.approx(2 * (alpha + 1), rel=1e-12)
        assert heat_capacity(tm, T)[0] == pytest.approx(2 * (alpha + 1), rel=1e-12)


def test_two_level_delta():
    assert delta_dof(two_level(), 1.0) == pytest.approx(two_level_delta(1.0), rel=1e-14)
    assert delta_dof(two_level(), 1.0) == pytest.approx(0.5378828427399902, rel=1e-12)


def test_two_level_D_closed_form():
    # 2 Var(x) for a Bernoulli(p) variable times 1: 2 p (1 - p) x^2 with x = E / kT
    for x in (0.3, 1.0, 4.0):
        p = math.exp(-x) / (1 + math.exp(-x))
        assert heat_capacity(two_level(), 1 / x)[0] == pytest.approx(2 * p * (1 - p) * x * x, rel=1e-12)


def test_delta_matches_direct_sums_for_hf4(si):
    m = build_hf_model(4)
    tm = ThermoModel.from_model(m, si)
    for T in (100.0, 1000.0, 5000.0):
        kT = si.k_B * T
        mean, var, _ = direct_gibbs(m.energies, m.degeneracies, kT)
        assert delta_dof(tm, T) == pytest.approx(2 * mean / kT, rel=1e-10)
        assert heat_capacity(tm, T)[0] == pytest.approx(2 * var / kT**2, rel=1e-9)


@pytest.mark.parametrize("T", [300.0, 1000.0, 3000.0, 1e4])
def test_hf1_closed_form(T, si, hf_inertia):
    tm = ThermoModel.from_model(build_hf_model(1, inertia=hf_inertia), si)
    assert delta_dof(tm, T) == pytest.approx(harmonic_delta(T_VIB, T), rel=1e-8)


def test_hf1_low_temperature_figure_shape(si, hf_inertia):
    tm = ThermoModel.from_model(build_hf_model(1, inertia=hf_inertia), si)
    assert 2.0 <= delta_dof(tm, 100.0) <= 2.01
    assert delta_dof(tm, 1e4) > 3.0


def test_hf2_vibration_decreases_at_high_temperature(si):
    tm = ThermoModel.from_model(morse_levels(HF_CONSTANTS, si), si)
    Ts = np.geomspace(1e5, 1e7, 60)
    assert np.all(np.diff(delta_dof(tm, Ts)) < 0)
    D6 = heat_capacity(tm, 1e6)[0]
    assert D6 < 0.1
    assert D6 < heat_capacity(tm, 1e4)[0]


def test_hf2_delta_decreasing_after_peak(si, hf_inertia):
    tm = ThermoModel.from_model(build_hf_model(2, inertia=hf_inertia), si)
    Ts = np.geomspace(3e4, 1e6, 80)
    assert np.all(np.diff(delta_dof(tm, Ts)) < 0)


def test_low_temperature_limit_with_ground_atom():
    tm = ThermoModel(ground((0.0, [(0.0, 2.0), (1.0, 3.0), (2.5, 1.0)], [])), RED)
    assert delta_dof(tm, 1 / 100) < 1e-8
    assert heat_capacity(tm, 1 / 100)[0] < 1e-8


def test_T_delta_nondecreasing(si, hf_inertia):
    for v in (1, 2, 3, 4):
        tm = ThermoModel.from_model(build_hf_model(v, inertia=hf_inertia), si)
        Ts = np.geomspace(10, 1e6, 300)
        Td = Ts * delta_dof(tm, Ts)
        assert np.all(np.diff(Td) >= -1e-12 * Td[1:])
        assert np.all(heat_capacity(tm, Ts)[0] >= 0)


@st.composite
def catalog_factor(draw):
    kind = draw(st.sampled_from(["mono", "power", "levels", "quad"]))
    if kind == "mono":
        return Monoatomic(draw(st.floats(-1, 1)))
    if kind == "power":
        return ContinuousPower(draw(st.floats(0.1, 5)), draw(st.floats(-0.9, 3)))
    if kind == "levels":
        es = draw(st.lists(st.floats(0, 5), min_size=1, max_size=4))
        rs = draw(st.lists(st.floats(0.5, 4), min_size=len(es), max_size=len(es)))
        return DiscreteLevels(tuple(es), tuple(rs))
    d = draw(st.integers(1, 3))
    return QuadraticClassical((draw(st.floats(0.1, 10)),) * d)


@settings(max_examples=50, deadline=None)
@given(st.lists(catalog_factor(), min_size=2, max_size=4), st.floats(0.05, 20))
def test_equipartition(factors, T):
    tm = ThermoModel.from_model(Product(tuple(factors)), RED)
    parts = [ThermoModel.from_model(f, RED) for f in factors]
    assert delta_dof(tm, T) == pytest.approx(sum(delta_dof(p, T) for p in parts), rel=1e-10, abs=1e-12)
    assert heat_capacity(tm, T)[0] == pytest.approx(sum(heat_capacity(p, T)[0] for p in parts),
                                                    rel=1e-10, abs=1e-12)


def test_domain_errors():
    tm = two_level()
    for f in (delta_dof, heat_capacity):
        with pytest.raises(DomainError):
            f(tm, 0.0)
        with pytest.raises(DomainError):
            f(tm, -1.0)
    with pytest.raises(DomainError):
        theta(tm, -1.0)
    with pytest.raises(DomainError):
        theta_inv(tm, -1.0)


# -- Theta

def test_theta_monoatomic_and_power():
    mono = ThermoModel.from_model(Monoatomic(), RED)
    assert theta(mono, 2.0) == 3.0
    assert theta_inv(mono, 3.0) == 2.0
    cp = ThermoModel.from_model(ContinuousPower(1.0, 1.0), RED)
    assert theta(cp, 2.0) == pytest.approx(3.5 * 2.0, rel=1e-15)
    assert theta(mono, 0.0) == 0.0 and theta_inv(mono, 0.0) == 0.0


def test_theta_is_integral_of_heat_capacity():
    from scipy.integrate import quad

    tm = ThermoModel(ground((0.0, [(0.0, 1.0), (1.0, 3.0)], [(0.5, 2.0, 0.5)])), RED)
    T = 2.3
    integral, _ = quad(lambda t: heat_capacity(tm, t)[1], 1e-9, T, epsabs=1e-13, epsrel=1e-12, limit=200)
    assert theta(tm, T) == pytest.approx(integral, rel=1e-9)


@pytest.mark.parametrize("variant", [1, 2, 3, 4])
def test_theta_round_trip(variant, si, hf_inertia):
    tm = ThermoModel.from_model(build_hf_model(variant, inertia=hf_inertia), si)
    for T in (10.0, 300.0, 5000.0):
        assert theta_inv(tm, theta(tm, T)) == pytest.approx(T, rel=1e-10)
    Ts = np.geomspace(0.5, 3e7, 50)  # also outside the cached table
    np.testing.assert_allclose(theta_inv(tm, theta(tm, Ts)), Ts, rtol=1e-10)


def test_theta_strictly_increasing(si, hf_inertia):
    tm = ThermoModel.from_model(build_hf_model(4), si)
    th = theta(tm, np.geomspace(1, 1e7, 500))
    assert np.all(np.diff(th) > 0)


# -- equilibrium energy

def test_equilibrium_energy(si, hf_inertia):
    tm = ThermoModel.from_model(Monoatomic(2e-20), RED)
    assert equilibrium_energy(tm, [0, 0, 0], 2.0) == pytest.approx(2e-20 + 3.0)
    assert equilibrium_energy(tm, [1, 2, 3], 2.0) == equilibrium_energy(tm, [-1, -2, -3], 2.0)
    hf = ThermoModel.from_model(build_hf_model(1, inertia=hf_inertia), si)
    kT = si.k_B * T_VIB
    expected = hf.epsilon0 + (3 + 2 + 2 / (math.e - 1)) / 2 * kT
    assert 2 + 2 / (math.e - 1) == pytest.approx(3.1639534137386525, rel=1e-15)
    assert equilibrium_energy(hf, np.zeros(3), T_VIB) == pytest.approx(expected, rel=1e-10)


# -- sampling

def test_gibbs_sample_two_level_frequency():
    rng = np.random.default_rng(11)
    _, lev = gibbs_sample(two_level(), 1.0, rng, size=100_000)
    p = math.exp(-1) / (1 + math.exp(-1))
    assert p == pytest.approx(0.2689414213699951)
    freq = lev.mean()
    assert abs(freq - p) < 4 * math.sqrt(p * (1 - p) / 100_000)


def test_gibbs_sample_mean_is_half_delta():
    rng = np.random.default_rng(5)
    tm = ThermoModel(ground((0.0, [(0.0, 1.0), (0.4, 2.0)], [(1.0, 0.2, 0.5), (0.3, 0.0, 2.0)])), RED)
    T = 0.8
    x, lev = gibbs_sample(tm, T, rng, size=1_000_000)
    assert lev is None
    y = x / T
    assert abs(y.mean() - delta_dof(tm, T) / 2) < 4 * y.std() / math.sqrt(len(y))
    # second moment against the closed-form variance
    D, _ = heat_capacity(tm, T)
    assert y.var() == pytest.approx(D / 2, rel=0.02)


def test_gibbs_sample_cold_limit():
    tm = ThermoModel(ground((0.0, [(0.0, 1.0), (1.0, 5.0)], [])), RED)
    T = 1 / 50
    p_excited = 5 * math.exp(-50) / (1 + 5 * math.exp(-50))
    assert p_excited < 1e-20
    x, lev = gibbs_sample(tm, T, np.random.default_rng(0), size=10_000)
    assert np.all(lev == 0) and np.all(x == 0)


def test_gibbs_sample_scalar():
    e, lev = gibbs_sample(two_level(), 1.0, np.random.default_rng(1))
    assert isinstance(e, float) and lev in (0, 1)


# -- Maxwellian

def test_maxwellian_peak_and_boltzmann_factor():
    tm = ThermoModel(ground((0.0, [(0.0, 1.0), (1.0, 3.0)], [])), PhysicalConstants.reduced(2.0))
    rho, T, u = 1.7, 0.9, np.array([0.3, -0.2, 0.1])
    z = partition_Z(tm, 1 / T)
    peak = rho * 2.0**0.5 * (2 * math.pi * T) ** -1.5 / z
    assert maxwellian_density(tm, rho, u, T, u, 0.0) == pytest.approx(peak, rel=1e-15)
    r = maxwellian_density(tm, rho, u, T, u + 0.1, T) / maxwellian_density(tm, rho, u, T, u + 0.1, 0.0)
    assert r == pytest.approx(math.exp(-1), rel=1e-14)


def test_maxwellian_mass_normalisation():
    m = 2.0
    tm = ThermoModel(ground((0.0, [(0.0, 1.0), (1.0, 3.0)], [(0.5, 0.3, 1.0)])), PhysicalConstants.reduced(m))
    rho, T, u = 1.3, 0.7, np.array([0.5, 0.0, -1.0])
    x, w = np.polynomial.hermite_e.hermegauss(20)  # weight exp(-x^2/2)
    s = math.sqrt(T / m)
    V = np.stack(np.meshgrid(x, x, x, indexing="ij"), -1).reshape(-1, 3) * s + u
    W = np.einsum("i,j,k->ijk", w, w, w).ravel() * s**3 * np.exp(0.5 * np.sum(((V - u) / s) ** 2, 1))
    vel = np.sum(W * maxwellian_density(tm, rho, u, T, V, 0.0))
    total = m * vel * laplace_moment(tm.measure, 0, 1 / T)
    assert total == pytest.approx(rho, rel=1e-8)


def test_maxwellian_domain():
    tm = two_level()
    with pytest.raises(DomainError):
        maxwellian_density(tm, 0.0, np.zeros(3), 1.0, np.zeros(3), 0.0)
    with pytest.raises(DomainError):
        maxwellian_density(tm, 1.0, np.zeros(3), 0.0, np.zeros(3), 0.0)
