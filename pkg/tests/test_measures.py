import numpy as np
import pytest

from errors import InvalidArgumentError
from kernels import SphereSamplePlan
from measures import (
    MeasureRep,
    boundary_cauchy_plus,
    cauchy_minus,
    cauchy_plus,
    distribution_tail,
    integrate,
    measure_from_document,
    pluriharmonic_residual,
    poisson_integral,
    stratified_circle_grid,
    total_mass,
)


def test_atomic_measure_integrals():
    mu = MeasureRep.atomic(np.array([1.0, -1.0]), np.array([0.25, 0.75]))
    assert total_mass(mu).value == pytest.approx(1.0)
    assert integrate(mu, lambda pts: np.real(pts[:, 0])).value == pytest.approx(-0.5)
    # P[δ_1](0.5) = 3
    assert poisson_integral(MeasureRep.atomic(np.array([1.0]), np.array([1.0])), 0.5).value == pytest.approx(3.0)


def test_uniform_measure_transforms_d1():
    mu = MeasureRep.uniform(1)
    assert poisson_integral(mu, 0.3 + 0.2j).value == pytest.approx(1.0, abs=1e-12)
    assert cauchy_plus(mu, 0.4).value == pytest.approx(1.0, abs=1e-12)
    assert abs(cauchy_minus(mu, 0.4).value) < 1e-12


def test_uniform_measure_sphere_monte_carlo():
    mu = MeasureRep.uniform(2, SphereSamplePlan.monte_carlo(2, 20_000, seed=2))
    est = poisson_integral(mu, np.array([0.3, 0.1j]))
    assert abs(est.value - 1.0) <= 4 * est.se + 1e-12


def test_density_needs_plan_in_higher_dimensions():
    mu = MeasureRep(dim=2, density=lambda pts: np.ones(pts.shape[0]))
    with pytest.raises(InvalidArgumentError):
        total_mass(mu)


def test_atoms_must_lie_on_sphere():
    with pytest.raises(InvalidArgumentError):
        MeasureRep.atomic(np.array([0.5]), np.array([1.0]))
    with pytest.raises(InvalidArgumentError):
        MeasureRep.atomic(np.array([1.0]), np.array([-1.0]))


def test_pluriharmonic_residual_of_atoms():
    mu = MeasureRep.atomic(np.array([1.0, 1j]), np.array([0.5, 0.5]))
    points = [0.2, 0.5j, -0.3 + 0.1j]
    assert pluriharmonic_residual(mu, points).value < 1e-12


def test_distribution_tail_plain_and_weighted():
    values = np.array([0.5, 2.0, 3.0, 10.0])
    weights = np.full(4, 0.25)
    assert distribution_tail(values, weights, 2.5).value == pytest.approx(0.5)
    weak = distribution_tail(values, weights, 2.5, test_values=np.array([1.0, 1.0, 2.0, 4.0]))
    assert weak.value == pytest.approx(1.5)
    with pytest.raises(InvalidArgumentError):
        distribution_tail(values, weights, 0.0)


def test_stratified_grid_weights_sum_to_one():
    points, weights = stratified_circle_grid(np.array([1.0]), base_cells=1024, refine=8)
    assert weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert points.size > 1024
    np.testing.assert_allclose(np.abs(points), 1.0)


def test_boundary_cauchy_plus_atom():
    mu = MeasureRep.atomic(np.array([1.0]), np.array([1.0]))
    assert boundary_cauchy_plus(mu, np.array([-1.0]))[0] == pytest.approx(0.5)


def test_measure_document_roundtrip():
    doc = {
        "dim": 1,
        "atoms": [{"point": [[0.0, 1.0]], "weight": [2.0, 0.0]}],
        "density": {"formula": "uniform"},
    }
    mu = measure_from_document(doc)
    assert total_mass(mu).value == pytest.approx(3.0, abs=1e-12)
    assert measure_from_document(mu.to_document()).atom_weights[0] == pytest.approx(2.0)
