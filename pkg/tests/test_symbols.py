import numpy as np
import pytest

from config import settings
from errors import (
    ExceptionalPointError,
    InvalidArgumentError,
    RangeViolationError,
    SymbolValidationError,
    UnsupportedSymbolError,
)
from symbols import (
    BlaschkeSymbol,
    ConstantSymbol,
    PolynomialSymbol,
    ProductSymbol,
    RationalSymbol,
    SingularInnerSymbol,
    random_blaschke,
    validate_schwarz,
)


def test_eval_examples():
    assert BlaschkeSymbol(((0j, 1),)).eval(0.5) == pytest.approx(0.5)
    half = PolynomialSymbol({(0, 0): 0.5, (1, 0): 0.5}, dim=2)
    assert half.eval(np.array([0.0, 0.3])) == pytest.approx(0.5)
    assert SingularInnerSymbol(((1 + 0j, 1.0),)).eval(0.0) == pytest.approx(np.exp(-1.0))


def test_eval_vectorised_shape():
    phi = PolynomialSymbol({(2,): 1.0})
    values = phi.eval(np.array([[0.1], [0.2], [0.3]]))
    np.testing.assert_allclose(values, [0.01, 0.04, 0.09])


def test_eval_range_violation():
    phi = PolynomialSymbol({(0,): 0.9, (1,): 0.9})
    with pytest.raises(RangeViolationError):
        phi.eval(0.5)


def test_boundary_eval_examples():
    assert PolynomialSymbol({(2,): 1.0}).boundary_eval(1j) == pytest.approx(-1.0)
    half = PolynomialSymbol({(0, 0): 0.5, (1, 0): 0.5}, dim=2)
    theta = 0.7
    value = half.boundary_eval(np.array([np.exp(1j * theta), 0.0]))
    assert value == pytest.approx((1 + np.exp(1j * theta)) / 2)
    singular = SingularInnerSymbol(((1 + 0j, 1.0),))
    assert abs(singular.boundary_eval(-1.0)) == pytest.approx(1.0)


def test_boundary_eval_exceptional_point():
    singular = SingularInnerSymbol(((1 + 0j, 1.0),))
    with pytest.raises(ExceptionalPointError):
        singular.boundary_eval(1.0)


def test_boundary_eval_needs_sphere_points():
    with pytest.raises(InvalidArgumentError):
        PolynomialSymbol({(1,): 1.0}).boundary_eval(0.5)


def test_slice_substitution():
    half = PolynomialSymbol({(0, 0): 0.5, (1, 0): 0.5}, dim=2)
    zeta = np.array([0.6, 0.8j])
    sl = half.slice(zeta)
    assert sl.eval(0.4) == pytest.approx((1 + 0.4 * 0.6) / 2)

    product = PolynomialSymbol({(1, 1): 1.0}, dim=2)
    sl = product.slice(np.array([1, 1]) / np.sqrt(2))
    np.testing.assert_allclose(sl.univariate_coefficients(), [0, 0, 0.5], atol=1e-15)


def test_slice_d1_identity():
    phi = random_blaschke(3, seed=1)
    sl = phi.slice(1.0)
    z = np.array([[0.1], [0.3j], [-0.5]])
    np.testing.assert_allclose(sl.eval(z), phi.eval(z), atol=1e-15)


def test_slice_parts_matches_slices():
    phi = PolynomialSymbol({(1, 0): 0.5, (0, 2): 0.25, (1, 1): 0.2}, dim=2)
    dirs = np.array([[1.0, 0.0], [0.6, 0.8], [0.0, 1j]])
    num, den = phi.slice_parts(dirs)
    np.testing.assert_allclose(den, 1.0)
    for row, zeta in zip(num, dirs):
        lam = 0.3 - 0.2j
        assert np.polynomial.polynomial.polyval(lam, row) == pytest.approx(phi.slice(zeta).eval(lam))
        assert phi.slice(zeta).eval(lam) == pytest.approx(phi.eval(lam * zeta))


def test_derivative1d_variants():
    assert PolynomialSymbol({(3,): 1.0}).derivative1d(0.5) == pytest.approx(0.75)
    b = BlaschkeSymbol(((0.5 + 0j, 1),))
    # b'(z) = (1 − |a|²)/(1 − āz)²
    assert b.derivative1d(0.0) == pytest.approx(0.75)
    singular = SingularInnerSymbol(((1 + 0j, 1.0),))
    # φ'(0) = −2 e^{−1}
    assert singular.derivative1d(0.0) == pytest.approx(-2 * np.exp(-1.0))
    with pytest.raises(InvalidArgumentError):
        PolynomialSymbol({(1, 0): 1.0}, dim=2).derivative1d(0.1)


def test_derivative_matches_finite_difference():
    phi = ProductSymbol((random_blaschke(2, seed=4), SingularInnerSymbol(((1j, 0.3),))))
    z, h = 0.2 + 0.1j, 1e-6
    numeric = (phi.eval(z + h) - phi.eval(z - h)) / (2 * h)
    assert phi.derivative1d(z) == pytest.approx(numeric, rel=1e-7)


def test_rational_parts_of_blaschke():
    b = BlaschkeSymbol(((0.5 + 0j, 1),))
    p, q = b.rational_parts()
    np.testing.assert_allclose(p, [-0.5, 1.0])
    np.testing.assert_allclose(q, [1.0, -0.5])
    with pytest.raises(UnsupportedSymbolError):
        SingularInnerSymbol(((1 + 0j, 1.0),)).rational_parts()


def test_inner_flags():
    assert PolynomialSymbol({(2,): 1.0}).is_inner
    assert not PolynomialSymbol({(0,): 0.5, (1,): 0.5}).is_inner
    assert random_blaschke(4, seed=2).is_inner
    assert ConstantSymbol(0.3).is_constant


def test_random_blaschke_is_recentred():
    b = random_blaschke(6, seed=7)
    assert b.degree == 6
    assert abs(b.value_at_origin()) < 1e-15


def test_constructor_validation():
    with pytest.raises(SymbolValidationError):
        BlaschkeSymbol(((1.0 + 0j, 1),))
    with pytest.raises(SymbolValidationError):
        SingularInnerSymbol(((1 + 0j, -1.0),))
    with pytest.raises(SymbolValidationError):
        PolynomialSymbol({(1, 0): 1.0}, dim=1)
    with pytest.raises(SymbolValidationError):
        RationalSymbol(PolynomialSymbol({(1,): 1.0}), PolynomialSymbol({(1,): 1.0}))


def test_validate_schwarz_passes_self_maps(half_plus_half_z):
    assert validate_schwarz(half_plus_half_z).passed
    ball = PolynomialSymbol({(1, 1): 1.0}, dim=2)
    result = validate_schwarz(ball, m=2000)
    assert result.passed
    assert result.max_modulus <= 0.5 + 1e-9
    assert validate_schwarz(random_blaschke(5, seed=3)).structural


def test_validate_schwarz_rejects_non_self_maps():
    result = validate_schwarz(PolynomialSymbol({(0,): 0.6, (1,): 0.6}))
    assert not result.passed
    assert result.max_modulus == pytest.approx(1.2, abs=1e-9)
    assert result.witness is not None
    assert not validate_schwarz(ConstantSymbol(1.5)).passed


def test_scale_rotates_values():
    phi = PolynomialSymbol({(0,): 0.5, (1,): 0.5})
    rotated = phi.scale(1j)
    assert rotated.eval(0.3) == pytest.approx(1j * phi.eval(0.3))


def test_compose_unitary_swaps_variables():
    phi = PolynomialSymbol({(0, 0): 0.5, (1, 0): 0.5}, dim=2)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    swapped = phi.compose_unitary(swap)
    assert swapped.eval(np.array([0.0, 0.4])) == pytest.approx(0.7)
    rot = np.array([[1.0, 1.0], [-1.0, 1.0]]) / np.sqrt(2)
    z = np.array([0.3, -0.2j])
    assert phi.compose_unitary(rot).eval(z) == pytest.approx(phi.eval(rot @ z))


def test_eval_rejects_unit_modulus_inside():
    # 0.5 + 0.5 = 1 精确
    phi = PolynomialSymbol({(0,): 0.5, (1,): 1.0})
    with pytest.raises(RangeViolationError):
        phi.eval(0.5)


def test_rational_denominator_zero_free_on_closed_disk():
    num = PolynomialSymbol({(0,): 0.1})
    with pytest.raises(SymbolValidationError) as info:
        RationalSymbol(num, PolynomialSymbol({(0,): 1.0, (1,): -2.0}))
    assert info.value.details["pole"] == pytest.approx(0.5)
    with pytest.raises(SymbolValidationError):
        RationalSymbol(num, PolynomialSymbol({(0,): 1.0, (1,): -1.0}))

    far = RationalSymbol(num, PolynomialSymbol({(0,): 1.0, (1,): -0.5}))
    result = validate_schwarz(far)
    assert result.passed
    assert result.max_modulus == pytest.approx(0.2, abs=1e-9)


def test_validate_schwarz_finds_poles_on_slices():
    num = PolynomialSymbol({(0, 0): 0.1}, dim=2)
    den = PolynomialSymbol({(0, 0): 1.0, (1, 0): -2.0}, dim=2)
    result = validate_schwarz(RationalSymbol(num, den), m=500)
    assert not result.passed
    assert result.max_modulus == float("inf")
    assert result.witness[0] == pytest.approx(0.5)


def test_degree_caps_follow_settings(monkeypatch):
    monkeypatch.setattr(settings, "max_polynomial_degree", 2)
    monkeypatch.setattr(settings, "max_product_factors", 1)
    with pytest.raises(SymbolValidationError):
        PolynomialSymbol({(3,): 1.0})
    z = PolynomialSymbol({(1,): 1.0})
    with pytest.raises(SymbolValidationError):
        ProductSymbol((z, z))
