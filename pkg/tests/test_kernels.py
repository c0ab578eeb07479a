import numpy as np
import pytest

from errors import DegenerateKernelError, InvalidArgumentError, PointDomainError
from kernels import (
    DiskGrid,
    SphereSamplePlan,
    adaptive_circle_mean,
    ball_point,
    cauchy_kernel,
    circle_nodes,
    mc_mean,
    pairwise_sum,
    poisson_kernel,
    sample_ball,
    sample_directions,
    slice_integrate,
    sphere_integrate,
    sphere_point,
)


def test_kernels_at_origin_are_one():
    zeta = np.array([0.6, 0.8j])
    assert cauchy_kernel(np.zeros(2), zeta) == pytest.approx(1.0)
    assert poisson_kernel(np.zeros(2), zeta) == pytest.approx(1.0)


def test_disk_kernels():
    assert cauchy_kernel(0.5, 1.0, 1) == pytest.approx(2.0)
    assert poisson_kernel(0.5, 1.0, 1) == pytest.approx(3.0)
    assert poisson_kernel(0.5, -1.0, 1) == pytest.approx(0.75 / 2.25)


def test_degenerate_kernel_raises():
    with pytest.raises(DegenerateKernelError):
        cauchy_kernel(np.array([1.0, 0.0]), np.array([1.0, 0.0]))


def test_point_domains():
    with pytest.raises(PointDomainError):
        ball_point(np.array([1.0, 0.0]))
    with pytest.raises(PointDomainError):
        sphere_point(np.array([0.5, 0.5]))
    assert sphere_point(np.array([0.6, 0.8])).shape == (2,)


def test_sample_directions_are_deterministic_and_chunked():
    a = sample_directions(3, 3000, seed=5)
    b = sample_directions(3, 1024, seed=5)
    assert a.shape == (3000, 3)
    np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0, atol=1e-14)
    np.testing.assert_array_equal(a[:1024], b)
    assert not np.allclose(a[:10], sample_directions(3, 10, seed=6))


def test_sample_ball_radius():
    pts = sample_ball(2, 500, seed=1, max_radius=0.7)
    assert pts.shape == (500, 2)
    assert np.max(np.linalg.norm(pts, axis=1)) <= 0.7 + 1e-15


def test_pairwise_sum_matches_sum():
    values = np.linspace(0.0, 1.0, 5000)
    assert pairwise_sum(values) == pytest.approx(values.sum(), rel=1e-14)
    assert pairwise_sum(np.array([])) == 0.0


def test_mc_mean_constant_has_zero_se():
    est = mc_mean(np.full(100, 2.5))
    assert est.value == pytest.approx(2.5)
    assert est.se == pytest.approx(0.0)


def test_circle_nodes_exact_quarters():
    nodes = circle_nodes(8).nodes
    assert nodes[0] == 1.0
    assert nodes[2] == 1j
    assert nodes[4] == -1.0
    with pytest.raises(InvalidArgumentError):
        circle_nodes(0)


def test_circle_trapezoid_kills_low_frequencies():
    nodes = circle_nodes(16).nodes
    for k in range(1, 16):
        assert abs(np.mean(nodes**k)) < 1e-14


def test_adaptive_circle_mean_poisson():
    # 圆周上 P(0.9, ·) 的均值为 1
    result = adaptive_circle_mean(lambda lam: (1 - 0.81) / np.abs(1 - 0.9 * np.conj(lam)) ** 2)
    assert not result.capped
    assert result.means[0] == pytest.approx(1.0, abs=1e-12)


def test_sphere_integrate_abs_z1_squared():
    f = lambda pts: np.abs(pts[:, 0]) ** 2  # noqa: E731
    mc = sphere_integrate(f, SphereSamplePlan.monte_carlo(2, 50_000, seed=3))
    assert abs(mc.value - 0.5) <= 4 * mc.se
    sliced = sphere_integrate(f, SphereSamplePlan.slice_product(2, 2000, 8, seed=3))
    assert abs(sliced.value - 0.5) <= 4 * sliced.se


def test_slice_integrate_d1_is_trapezoid():
    est = slice_integrate(lambda pts: np.real(pts[:, 0]) ** 2, 1, 1, 32)
    assert est.value == pytest.approx(0.5, abs=1e-14)


def test_slice_product_plan_checks_shape():
    with pytest.raises(InvalidArgumentError):
        SphereSamplePlan(dimension=2, sample_count=10, mode="slice-product", directions=3, circle_nodes=4)


@pytest.mark.parametrize("center", [0.0, 0.5, 0.3 - 0.4j])
def test_disk_grid_weights_cover_unit_disk(center):
    _, weights = DiskGrid(16, 128, center=center).nodes()
    assert weights.sum() == pytest.approx(1.0, abs=1e-10)


def test_disk_grid_integrates_abs_squared():
    # ∫|w|² dA/π = 1/2
    points, weights = DiskGrid(16, 64).nodes()
    assert np.sum(weights * np.abs(points) ** 2) == pytest.approx(0.5, abs=1e-12)
