import numpy as np
import pytest

from counting import (
    bhat_N,
    disk_roots,
    integrated_counting,
    jensen_bound_check,
    littlewood_paley_check,
    majorant,
    slice_counting,
    stanton_check,
)
from errors import ConstantSliceError, ExcludedTargetError
from kernels import SphereSamplePlan
from symbols import ConstantSymbol, PolynomialSymbol, random_blaschke


def test_slice_counting_monomials(z):
    assert slice_counting(z, 1.0, 0.5).value == pytest.approx(np.log(2.0))
    z2 = PolynomialSymbol({(2,): 1.0})
    sample = slice_counting(z2, 1.0, 0.25)
    assert sample.value == pytest.approx(2 * np.log(2.0))
    assert sorted(round(r.real, 12) for r, _ in sample.roots) == [-0.5, 0.5]


def test_slice_counting_affine(half_plus_half_z):
    # φ(z) = w ⇔ z = 2w − 1
    assert slice_counting(half_plus_half_z, 1.0, 0.25).value == pytest.approx(np.log(2.0))
    assert slice_counting(half_plus_half_z, 1.0, 0.9).value == pytest.approx(-np.log(0.8))
    # 2w − 1 在圆盘外: 没有原像
    assert slice_counting(half_plus_half_z, 1.0, -0.25).value == pytest.approx(0.0)


def test_slice_counting_small_target():
    z2 = PolynomialSymbol({(2,): 1.0})
    sample = slice_counting(z2, 1.0, 1e-3 + 0j)
    assert sample.value == pytest.approx(np.log(1e3))


def test_slice_counting_exclusions(z):
    with pytest.raises(ConstantSliceError):
        slice_counting(ConstantSymbol(0.3), 1.0, 0.1)
    with pytest.raises(ExcludedTargetError):
        slice_counting(z, 1.0, 0.0)
    ball = PolynomialSymbol({(1, 0): 1.0}, dim=2)
    with pytest.raises(ConstantSliceError):
        slice_counting(ball, np.array([0.0, 1.0]), 0.3)


def test_disk_roots_batch():
    found = disk_roots(
        np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        np.ones((2, 1)),
        np.array([0.5, 0.09]),
    )
    assert found.ok.all()
    np.testing.assert_allclose(found.counts, [np.log(2.0), 2 * np.log(1 / 0.3)])


def test_integrated_counting_ball2(corpus):
    # |ζ₁|² 在 S³ 上服从 U(0,1): ∫N dσ = (a − 1 − log a)/2, a = |w|²
    phi = corpus("z1_ball2")
    w = 0.5
    a = w * w
    expected = 0.5 * (a - 1.0 - np.log(a))
    est = integrated_counting(phi, w, SphereSamplePlan.monte_carlo(2, 20_000, seed=3))
    assert abs(est.value - expected) <= 4 * est.se


def test_integrated_counting_constant_is_zero():
    assert integrated_counting(ConstantSymbol(0.3), 0.5).value == 0.0


def test_majorant_equals_counting_for_inner_slices():
    z2 = PolynomialSymbol({(2,): 1.0})
    for w in (0.3, 0.2 + 0.5j, -0.7j):
        assert majorant(z2, 1.0, w) == pytest.approx(slice_counting(z2, 1.0, w).value, abs=1e-10)
    b = random_blaschke(4, seed=6)
    w = 0.1 - 0.2j
    assert majorant(b, 1.0, w) == pytest.approx(slice_counting(b, 1.0, w).value, abs=1e-8)


def test_majorant_dominates(half_plus_half_z):
    for w in (0.25, 0.9, 0.4 + 0.3j, -0.25):
        assert slice_counting(half_plus_half_z, 1.0, w).value <= majorant(half_plus_half_z, 1.0, w) + 1e-8


def test_jensen_bound_check(corpus):
    result = jensen_bound_check(corpus("half_plus_half_z"), samples=40, seed=1)
    assert result.passed
    assert result.equality_gap is None
    inner = jensen_bound_check(corpus("z2"), samples=40, seed=1)
    assert inner.passed
    assert inner.equality_gap is not None
    ball = jensen_bound_check(corpus("z1z2_ball2"), samples=40, seed=1)
    assert ball.passed


def test_stanton_identity_d1(z, half_plus_half_z):
    for phi in (z, half_plus_half_z):
        for f in ([1.0], [0.0, 1.0], [0.0, 0.5, 0.0, 1.0]):
            check = stanton_check(f, phi)
            assert check.residual.value <= max(1e-6, 3 * check.residual.se)


def test_stanton_identity_ball2(corpus):
    phi = corpus("z1_ball2")
    plan = SphereSamplePlan.slice_product(2, 16, 64, seed=2)
    check = stanton_check([0.0, 0.0, 1.0], phi, plan)
    assert check.residual.value <= max(1e-6, 3 * check.residual.se)
    assert check.grid["directions"] == 16


def test_littlewood_paley_grid():
    check = littlewood_paley_check([0.0, 0.0, 1.0])
    assert check.lhs.value == pytest.approx(1.0)
    assert check.rhs.value == pytest.approx(1.0, abs=1e-8)


def test_bhat_N_for_z(z):
    ladder = bhat_N(z, [0.9, 0.99, 0.999, 0.9999], angular=16)
    expected = [-np.log(r) / (1 - r) for r in ladder.radii]
    np.testing.assert_allclose(ladder.sups, expected, rtol=1e-10)
    assert ladder.estimate == pytest.approx(1.0, abs=1e-3)
    neg_log = bhat_N(z, [0.9, 0.99], angular=8, normalization="neg_log")
    np.testing.assert_allclose(neg_log.sups, 1.0, rtol=1e-10)


def test_bhat_N_constant_is_zero():
    ladder = bhat_N(ConstantSymbol(0.3), [0.9, 0.99, 0.999], angular=8)
    assert ladder.estimate == 0.0
    assert ladder.band == 0.0
