import numpy as np
import pytest

from errors import InsufficientResolutionError, InvalidArgumentError, UnsupportedSymbolError
from kernels import sample_ball
from modelspace import (
    KernelSpan,
    adjoint_apply,
    atom_norm,
    gram_test,
    ksmall_member,
    repkernel,
    roundtrip_residual,
    unitary_apply,
)
from symbols import PolynomialSymbol, SingularInnerSymbol, random_blaschke

Z2 = PolynomialSymbol({(2,): 1.0})


def test_repkernel_value():
    # (1 − 1/16)/(1 − 1/4)
    assert repkernel(Z2, 0.5, 0.5) == pytest.approx(1.25)
    assert repkernel(Z2, 0.0, 0.7) == pytest.approx(1.0)
    with pytest.raises(InvalidArgumentError):
        repkernel(Z2, 1.0, 0.0)


def test_gram_test_matches_kernel():
    b = random_blaschke(5, seed=11)
    points = sample_ball(1, 6, seed=2, max_radius=0.8)[:, 0]
    for alpha in (1.0, 1j, np.exp(0.4j)):
        result = gram_test(b, alpha, points)
        assert result.residual <= 1e-8
        assert result.to_dict()["basis_size"] == 6


def test_unitary_preserves_kernel_norm():
    b = random_blaschke(3, seed=12)
    for w in (0.2, -0.5j, 0.6 + 0.3j):
        assert atom_norm(b, -1.0, w) == pytest.approx(repkernel(b, w, w).real, abs=1e-10)


def test_adjoint_roundtrip():
    b = random_blaschke(4, seed=13)
    test_points = sample_ball(1, 10, seed=3)[:, 0]
    assert roundtrip_residual(b, 1j, 0.3 - 0.2j, test_points) <= 1e-10


def test_adjoint_needs_one_value_per_atom():
    with pytest.raises(InvalidArgumentError):
        adjoint_apply(Z2, 1.0, np.ones(3))
    image = unitary_apply(Z2, 1.0, 0.4)
    back = adjoint_apply(Z2, 1.0, image)
    assert back(0.1) == pytest.approx(repkernel(Z2, 0.1, 0.4))


def test_ksmall_membership():
    assert ksmall_member(Z2, [1.0]).member
    assert ksmall_member(Z2, [0.0, 1.0]).member
    result = ksmall_member(Z2, [0.0, 0.0, 1.0])
    assert not result.member
    assert result.max_violation == pytest.approx(1.0)
    assert result.to_dict()["verdict"] == "not-member"


def test_ksmall_kernel_span_is_member():
    b = random_blaschke(4, seed=14)
    span = KernelSpan(b, [0.1, -0.3j, 0.5], [1.0, 2.0, -1j])
    assert ksmall_member(b, span, nodes=2048).member


def test_ksmall_resolution():
    with pytest.raises(InsufficientResolutionError):
        ksmall_member(Z2, [0.0] * 10 + [1.0], nodes=16)
    with pytest.raises(InsufficientResolutionError):
        ksmall_member(Z2, lambda zeta: zeta, nodes=8)


def test_kernel_span_validation():
    with pytest.raises(InvalidArgumentError):
        KernelSpan(Z2, [0.3, 0.3 + 1e-10])
    with pytest.raises(InvalidArgumentError):
        KernelSpan(Z2, [0.3, 0.4], [1.0])
    with pytest.raises(UnsupportedSymbolError):
        KernelSpan(PolynomialSymbol({(0,): 0.5, (1,): 0.5}), [0.1])


def test_singular_inner_has_no_atomic_unitary():
    phi = SingularInnerSymbol(((1 + 0j, 1.0),))
    assert repkernel(phi, 0.2, 0.2).real > 0
    with pytest.raises(UnsupportedSymbolError):
        gram_test(phi, 1.0, [0.1, 0.2])


def test_ksmall_singular_inner_atom_on_the_grid():
    inner = SingularInnerSymbol(((1 + 0j, 1.0),))
    # I(0)·1 = e^{-1} 留在 0 号系数上
    constant = ksmall_member(inner, [1.0])
    assert not constant.member
    assert constant.max_violation == pytest.approx(np.exp(-1.0), abs=0.05)

    # I·conj(I·ζ̄) = ζ, 非正频率为零
    def shifted_inner(zeta):
        return inner.boundary_eval(zeta.reshape(-1, 1)) * np.conj(zeta)

    shifted = ksmall_member(inner, shifted_inner, nodes=512)
    assert shifted.member
    assert shifted.max_violation <= 1e-10
