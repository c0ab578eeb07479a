import numpy as np
import pytest

from clark import (
    DISINTEGRATION_TESTS,
    ClarkSampler,
    clark_ac_density,
    clark_atoms_d1,
    clark_contact_atoms_d1,
    clark_data,
    clark_family,
    clark_masses,
    clark_singular_mass,
    clark_total_mass,
    disintegration_check,
    poltoratski_check,
    rotation_pair,
    slice_singular_mass,
    cauchy_plus_closed_form,
    verify_cauchy_plus,
    verify_double_cauchy,
    verify_herglotz,
)
from errors import ContactPointError, InvalidArgumentError, UnsupportedSymbolError
from kernels import SphereSamplePlan, circle_nodes, sample_ball
from symbols import ConstantSymbol, PolynomialSymbol, SingularInnerSymbol, random_blaschke


def test_total_mass_examples(z, half_plus_half_z):
    for alpha in circle_nodes(7).nodes:
        assert clark_total_mass(z, alpha) == pytest.approx(1.0, abs=1e-12)
    assert clark_total_mass(half_plus_half_z, 1.0) == pytest.approx(3.0, abs=1e-12)
    assert clark_total_mass(half_plus_half_z, -1.0) == pytest.approx(1.0 / 3.0, abs=1e-12)
    with pytest.raises(InvalidArgumentError):
        clark_total_mass(z, 0.5)


def test_ac_density_examples(half_plus_half_z):
    thetas = np.linspace(0.1, 6.0, 17)
    density = clark_ac_density(half_plus_half_z, 1.0, np.exp(1j * thetas).reshape(-1, 1))
    np.testing.assert_allclose(density, 1.0, atol=1e-12)
    z2 = PolynomialSymbol({(2,): 1.0})
    assert clark_ac_density(z2, 1j, np.exp(0.3j)) == pytest.approx(0.0, abs=1e-12)
    c = ConstantSymbol(0.3)
    assert clark_ac_density(c, -1.0, 1j) == pytest.approx(0.91 / 1.69)


def test_ac_density_contact_point(half_plus_half_z):
    with pytest.raises(ContactPointError):
        clark_ac_density(half_plus_half_z, 1.0, 1.0)


def test_singular_mass_d1(half_plus_half_z):
    assert clark_singular_mass(half_plus_half_z, 1.0).value == pytest.approx(2.0, abs=1e-8)
    assert clark_singular_mass(half_plus_half_z, 1j).value == pytest.approx(0.0, abs=1e-8)
    b = random_blaschke(5, seed=2)
    assert clark_singular_mass(b, -1j).value == pytest.approx(clark_total_mass(b, -1j), abs=1e-10)


def test_singular_mass_ball2_is_zero(corpus, ball2_plan):
    phi = corpus("half_plus_half_z1_ball2")
    data = clark_data(phi, 1.0, ball2_plan)
    assert abs(data.ac_mass - 3.0) <= 3 * data.ac_mass_se + 1e-12
    assert abs(data.singular_mass) <= 3 * data.ac_mass_se + 1e-12
    assert data.budget_ok


def test_atoms_of_z_squared():
    points, weights = clark_atoms_d1(PolynomialSymbol({(2,): 1.0}), 1.0)
    np.testing.assert_allclose(np.sort(points.real), [-1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(weights, 0.5, atol=1e-12)


@pytest.mark.parametrize("degree,seed", [(2, 1), (5, 3), (8, 9)])
def test_atom_weights_sum_to_total_mass(degree, seed):
    b = random_blaschke(degree, seed=seed, recenter=False)
    for alpha in (1.0, 1j, np.exp(2.0j)):
        points, weights = clark_atoms_d1(b, alpha)
        assert points.size == degree
        np.testing.assert_allclose(np.abs(b.boundary_eval(points.reshape(-1, 1)) - alpha), 0.0, atol=1e-10)
        assert weights.sum() == pytest.approx(clark_total_mass(b, alpha), abs=1e-8)


def test_atoms_need_blaschke(half_plus_half_z):
    with pytest.raises(UnsupportedSymbolError):
        clark_atoms_d1(half_plus_half_z, 1.0)
    with pytest.raises(UnsupportedSymbolError):
        clark_atoms_d1(SingularInnerSymbol(((1 + 0j, 1.0),)), 1.0)


def test_contact_atoms_of_half_plus_half_z(half_plus_half_z):
    points, weights = clark_contact_atoms_d1(half_plus_half_z, 1.0)
    np.testing.assert_allclose(points, [1.0], atol=1e-10)
    np.testing.assert_allclose(weights, [2.0], atol=1e-8)
    points, _ = clark_contact_atoms_d1(half_plus_half_z, 1j)
    assert points.size == 0


def test_clark_data_budget(half_plus_half_z):
    data = clark_data(half_plus_half_z, 1.0)
    assert data.singular_mass == pytest.approx(2.0, abs=1e-8)
    assert data.atom_budget_gap < 1e-8
    doc = data.to_dict()
    assert doc["total_mass"] == pytest.approx(3.0)
    assert len(doc["atoms"]) == 1


def test_singular_inner_falls_back_to_budget():
    phi = SingularInnerSymbol(((1 + 0j, 1.0),))
    data = clark_data(phi, 1j)
    assert data.atom_points is None
    assert data.singular_mass == pytest.approx(data.total_mass, abs=1e-10)
    assert data.warnings


def test_clark_family_and_masses_agree(half_plus_half_z):
    alphas = circle_nodes(6, offset=0.5).nodes
    family = clark_family(half_plus_half_z, alphas)
    masses = clark_masses(half_plus_half_z, alphas)
    for data, (total, ac) in zip(family, masses):
        assert data.total_mass == pytest.approx(total)
        assert data.ac_mass == pytest.approx(ac.value, abs=1e-12)


def test_sampler_shares_points(corpus):
    phi = corpus("z1_ball2")
    sampler = ClarkSampler(phi, SphereSamplePlan.monte_carlo(2, 50_000, seed=4))
    for alpha in (1.0, -1.0, 1j):
        est = sampler.ac_mass(alpha)
        assert abs(est.value - 1.0) <= 4 * est.se
    with pytest.raises(InvalidArgumentError):
        ClarkSampler(phi, SphereSamplePlan.monte_carlo(3, 10))


def test_herglotz_identity_blaschke():
    b = random_blaschke(6, seed=5)
    points = sample_ball(1, 20, seed=1)
    for alpha in circle_nodes(4, offset=0.5).nodes:
        assert verify_herglotz(b, alpha, clark_data(b, alpha), points).value <= 1e-10


def test_herglotz_identity_with_density(half_plus_half_z):
    points = sample_ball(1, 5, seed=2, max_radius=0.7)
    for alpha in (1.0, -1.0):
        residual = verify_herglotz(half_plus_half_z, alpha, clark_data(half_plus_half_z, alpha), points)
        assert residual.value <= 1e-8


def test_cauchy_plus_closed_form(corpus, half_plus_half_z):
    z2 = corpus("z2")
    assert cauchy_plus_closed_form(z2, 1.0, 0.5) == pytest.approx(4 / 3, abs=1e-12)
    assert cauchy_plus_closed_form(half_plus_half_z, 1.0, 0.0) == pytest.approx(3.0, abs=1e-12)
    assert verify_cauchy_plus(z2, 1.0, clark_data(z2, 1.0), [0.5]).value <= 1e-12
    points = sample_ball(1, 5, seed=7, max_radius=0.7)
    for alpha in (1.0, 1j):
        residual = verify_cauchy_plus(half_plus_half_z, alpha, clark_data(half_plus_half_z, alpha), points)
        assert residual.value <= 1e-8


def test_double_cauchy_atomic_route():
    b = random_blaschke(4, seed=8)
    z = sample_ball(1, 10, seed=3)
    w = sample_ball(1, 10, seed=4)
    residual = verify_double_cauchy(b, 1j, clark_data(b, 1j), list(zip(z, w)))
    assert residual.value <= 1e-10


def test_double_cauchy_monte_carlo_route(corpus, ball2_plan):
    phi = corpus("half_plus_half_z1_ball2")
    z = sample_ball(2, 3, seed=5, max_radius=0.5)
    w = sample_ball(2, 3, seed=6, max_radius=0.5)
    residual = verify_double_cauchy(phi, -1.0, clark_data(phi, -1.0, ball2_plan), list(zip(z, w)), ball2_plan)
    assert residual.value <= 3 * residual.se + 1e-10


@pytest.mark.parametrize("test", ["one", "re_z1", "abs_z1_sq"])
def test_disintegration_d1(half_plus_half_z, test):
    res = disintegration_check(half_plus_half_z, DISINTEGRATION_TESTS[test], 64)
    assert res.residual.value <= max(1e-8, 3 * res.residual.se)


def test_disintegration_ball2(corpus):
    phi = corpus("z1z2_ball2")
    plan = SphereSamplePlan.monte_carlo(2, 20_000, seed=7)
    res = disintegration_check(phi, DISINTEGRATION_TESTS["abs_z1_sq"], 64, plan)
    assert res.residual.value <= max(1e-8, 3 * res.residual.se)


def test_poltoratski_tail_for_z(z):
    res = poltoratski_check(z, 1.0, [100.0, 1000.0])
    _, value, _ = res.rows[-1]
    assert 0.9 <= value <= 1.1
    assert res.target.value == pytest.approx(1.0)


def test_poltoratski_rejects_bad_grid(z):
    with pytest.raises(InvalidArgumentError):
        poltoratski_check(z, 1.0, [0.0])


def test_rotation_invariance(half_plus_half_z):
    rotated, alpha = rotation_pair(half_plus_half_z, 1.0, 0.7)
    assert clark_singular_mass(rotated, alpha).value == pytest.approx(2.0, abs=1e-8)
    assert clark_total_mass(rotated, alpha) == pytest.approx(3.0, abs=1e-12)


def test_slice_singular_mass(corpus):
    assert slice_singular_mass(corpus("half_plus_half_z"), 1.0).value == pytest.approx(2.0, abs=1e-8)
    phi = corpus("half_plus_half_z1_ball2")
    est = slice_singular_mass(phi, 1.0, SphereSamplePlan.slice_product(2, 256, 8, seed=1))
    assert est.value == pytest.approx(0.0, abs=1e-12)


def test_clark_data_density_handle(half_plus_half_z):
    data = clark_data(half_plus_half_z, -1.0)
    zeta = np.exp(1j * np.array([0.4, 2.0])).reshape(-1, 1)
    np.testing.assert_allclose(data.density()(zeta), clark_ac_density(half_plus_half_z, -1.0, zeta))
    assert clark_data(random_blaschke(3, seed=2), 1j).density() is None
