"""
测度模块 - 球面测度的表示及其变换

MeasureRep = 有限原子部分 + 可选的绝对连续部分 (密度函数 + 求积方案)。

变换:
    total_mass / integrate / poisson_integral
    cauchy_plus  μ₊(z) = ∫ C(z, ζ) dμ(ζ)
    cauchy_minus μ₋(z) = ∫ (C(ζ, z) − 1) dμ(ζ)   (共轭解析)
    distribution_tail  {|μ₊| > y} 的 σ_d 测度估计

d=1 的密度部分用自适应梯形 (节点偏移避开例外点), d ≥ 2 按方案做 MC 或切片求积。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from config import settings
from errors import ClarkLabError, ExceptionalPointError, InvalidArgumentError, UnsupportedSymbolError
from kernels import (
    BoundaryFunction,
    Estimate,
    SphereSamplePlan,
    adaptive_circle_mean,
    cauchy_kernel,
    circle_nodes,
    mc_mean,
    poisson_kernel,
    sample_sphere,
    slice_integrate,
)


@dataclass(frozen=True, eq=False)
class MeasureRep:
    """∂B_d 上的测度: 原子 + 密度"""

    dim: int
    atom_points: np.ndarray = field(default_factory=lambda: np.empty((0, 1), dtype=complex))
    atom_weights: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))
    density: BoundaryFunction | None = None
    plan: SphereSamplePlan | None = None
    positive: bool = True
    node_offset: float = 0.0
    density_tag: dict[str, Any] | None = None

    def __post_init__(self):
        points = np.asarray(self.atom_points, dtype=complex).reshape(-1, self.dim)
        weights = np.asarray(self.atom_weights, dtype=complex).reshape(-1)
        if points.shape[0] != weights.size:
            raise InvalidArgumentError("atom points and weights differ in length", module="measures", operation="MeasureRep")
        if points.size and np.any(np.abs(np.linalg.norm(points, axis=1) - 1.0) > 1e-12):
            raise InvalidArgumentError("atoms must lie on the sphere", module="measures", operation="MeasureRep")
        if self.positive and np.any((weights.real < 0) | (np.abs(weights.imag) > 0)):
            raise InvalidArgumentError("positive measures need nonnegative real weights", module="measures", operation="MeasureRep")
        object.__setattr__(self, "atom_points", points)
        object.__setattr__(self, "atom_weights", weights)

    @classmethod
    def atomic(cls, points, weights, dim: int = 1, positive: bool = True) -> "MeasureRep":
        return cls(dim=dim, atom_points=points, atom_weights=weights, positive=positive)

    @classmethod
    def uniform(cls, dim: int, plan: SphereSamplePlan | None = None) -> "MeasureRep":
        """σ_d (密度 ≡ 1)"""
        return cls(
            dim=dim,
            density=lambda pts: np.ones(pts.shape[0]),
            plan=plan,
            density_tag={"formula": "uniform"},
        )

    @property
    def has_density(self) -> bool:
        return self.density is not None

    def to_document(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "positive": self.positive,
            "atoms": [
                {"point": [[c.real, c.imag] for c in p], "weight": [complex(w).real, complex(w).imag]}
                for p, w in zip(self.atom_points, self.atom_weights)
            ],
            "density": self.density_tag,
        }


# === 积分 ===


def _density_integral(mu: MeasureRep, f: BoundaryFunction | None) -> Estimate:
    if mu.density is None:
        return Estimate(0.0, 0.0)

    def integrand(pts: np.ndarray) -> np.ndarray:
        values = np.asarray(mu.density(pts))
        return values if f is None else values * np.asarray(f(pts))

    plan = mu.plan
    if mu.dim == 1 and (plan is None or plan.mode == "monte-carlo"):
        start = plan.sample_count if plan is not None else settings.circle_nodes
        result = adaptive_circle_mean(
            lambda lam: integrand(lam.reshape(-1, 1)),
            start_nodes=min(start, settings.max_circle_nodes_d1),
            max_nodes=settings.max_circle_nodes_d1,
            rtol=settings.quadrature_rtol,
            offset=mu.node_offset,
        )
        value = result.means[0]
        value = complex(value) if np.iscomplexobj(result.means) else float(value)
        return Estimate(value, float(result.errors[0]))
    if plan is None:
        raise InvalidArgumentError("d >= 2 densities need a sampling plan", module="measures", operation="integrate")
    if plan.mode == "monte-carlo":
        return mc_mean(integrand(sample_sphere(plan)))
    return slice_integrate(
        integrand,
        plan.dimension,
        plan.directions,
        plan.circle_nodes,
        seed=plan.seed,
        offset=mu.node_offset,
        refine_to=plan.refine_to,
        rtol=settings.quadrature_rtol,
    )


def integrate(mu: MeasureRep, f: BoundaryFunction | None = None) -> Estimate:
    """Σ w_j f(ζ_j) + 密度部分的求积; f=None 表示 f ≡ 1"""
    atom_part: complex = 0j
    if mu.atom_weights.size:
        if f is None:
            atom_part = complex(np.sum(mu.atom_weights))
        else:
            try:
                values = np.asarray(f(mu.atom_points))
            except ClarkLabError as exc:
                raise ExceptionalPointError(
                    f"atom collides with the integrand's exceptional set ({exc.message})",
                    module="measures",
                    operation="integrate",
                    details=exc.details,
                ) from exc
            atom_part = complex(np.sum(mu.atom_weights * values))
    dens = _density_integral(mu, f)
    value = atom_part + dens.value
    if mu.positive and f is None:
        value = float(np.real(value))
    return Estimate(value, dens.se)


def total_mass(mu: MeasureRep) -> Estimate:
    return integrate(mu, None)


def poisson_integral(mu: MeasureRep, z) -> Estimate:
    """P[μ](z)"""
    est = integrate(mu, lambda pts: poisson_kernel(z, pts, mu.dim))
    return Estimate(float(np.real(est.value)) if mu.positive else est.value, est.se)


def cauchy_plus(mu: MeasureRep, z) -> Estimate:
    """μ₊(z) = ∫ C(z, ζ) dμ(ζ)"""
    return integrate(mu, lambda pts: cauchy_kernel(z, pts, mu.dim))


def cauchy_minus(mu: MeasureRep, z) -> Estimate:
    """μ₋(z) = ∫ (C(ξ, z) − 1) dμ(ξ)"""
    return integrate(mu, lambda pts: cauchy_kernel(pts, z, mu.dim) - 1.0)


def pluriharmonic_residual(mu: MeasureRep, points) -> Estimate:
    """max |μ₊ + μ₋ − P[μ]| over points, 带最大 SE"""
    worst = 0.0
    worst_se = 0.0
    for z in points:

        def combined(pts: np.ndarray, z=z) -> np.ndarray:
            return (
                cauchy_kernel(z, pts, mu.dim)
                + cauchy_kernel(pts, z, mu.dim)
                - 1.0
                - poisson_kernel(z, pts, mu.dim)
            )

        est = integrate(mu, combined)
        if abs(est.value) >= worst:
            worst = abs(est.value)
            worst_se = est.se
    return Estimate(float(worst), float(worst_se))


# === 分布尾部 ===


def distribution_tail(values, weights, y: float, test_values=None) -> Estimate:
    """σ_d({|μ₊| > y}) 的估计

    values:       边界点上的 |μ₊|
    weights:      对应的求积权重 (和为 1)
    test_values:  给出时估计 ∫ f χ_{|μ₊|>y} dσ_d (弱* 形式)
    """
    if y <= 0:
        raise InvalidArgumentError("threshold y must be positive", module="measures", operation="distribution_tail")
    values = np.asarray(values, dtype=float).reshape(-1)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    total = float(np.sum(weights))
    hit = values > y
    if test_values is None:
        p = float(np.sum(weights[hit])) / total
        se = float(np.sqrt(max(p * (1.0 - p), 0.0) * np.sum(weights**2))) / total
        return Estimate(p, se)
    f = np.asarray(test_values).reshape(-1)
    contrib = np.where(hit, f, 0.0)
    est = complex(np.sum(weights * contrib)) / total
    second = float(np.sum(weights * np.abs(contrib) ** 2)) / total
    se = float(np.sqrt(max(second - abs(est) ** 2, 0.0) * np.sum(weights**2))) / total
    return Estimate(est, se)


def stratified_circle_grid(
    hot_points,
    base_cells: int = 2**16,
    radius: float = 0.05,
    refine: int = 64,
    hot_cells: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """θ 的分层中点网格: 距 hot_points 不超过 radius 的单元再细分 refine 倍

    hot_cells 是长度 base_cells 的布尔掩码, 标记的单元同样细分。

    返回 (圆周点, 权重), 权重和为 1。
    """
    edges = 2.0 * np.pi * np.arange(base_cells + 1) / base_cells
    mids = 0.5 * (edges[:-1] + edges[1:])
    width = 2.0 * np.pi / base_cells
    hot = np.angle(np.asarray(hot_points, dtype=complex).reshape(-1))
    near = np.zeros(base_cells, dtype=bool) if hot_cells is None else np.asarray(hot_cells, dtype=bool).copy()
    for h in hot:
        gap = np.abs(np.angle(np.exp(1j * (mids - h))))
        near |= gap <= radius + width
    coarse_theta = mids[~near]
    fine_left = edges[:-1][near]
    sub = (np.arange(refine) + 0.5) / refine * width
    fine_theta = (fine_left[:, None] + sub[None, :]).reshape(-1)
    theta = np.concatenate([coarse_theta, fine_theta])
    weights = np.concatenate(
        [np.full(coarse_theta.size, width), np.full(fine_theta.size, width / refine)]
    ) / (2.0 * np.pi)
    return np.exp(1j * theta), weights


def boundary_cauchy_plus(mu: MeasureRep, zeta, nodes: int = 256) -> np.ndarray:
    """d=1 边界上的 μ₊: 原子部分精确, 密度部分取密度的解析投影 Σ_{k≥0} ĥ(k) ζ^k"""
    if mu.dim != 1:
        raise UnsupportedSymbolError(
            "boundary Cauchy transform is available for d=1 only", module="measures", operation="boundary_cauchy_plus"
        )
    pts = np.asarray(zeta, dtype=complex).reshape(-1)
    out = np.zeros(pts.shape, dtype=complex)
    for xi, w in zip(mu.atom_points[:, 0], mu.atom_weights):
        out += w / (1.0 - pts * np.conj(xi))
    if mu.density is not None:
        grid = circle_nodes(nodes, mu.node_offset).nodes
        samples = np.asarray(mu.density(grid.reshape(-1, 1)), dtype=complex)
        # ĥ(k) = mean(h ζ̄^k), k = 0..n/2−1
        ks = np.arange(nodes // 2)
        coeffs = (samples[None, :] * np.conj(grid)[None, :] ** ks[:, None]).mean(axis=1)
        out += np.polynomial.polynomial.polyval(pts, coeffs)
    return out


def measure_from_document(document: dict[str, Any], plan: SphereSamplePlan | None = None) -> MeasureRep:
    """MeasureDoc → MeasureRep; clark-ac 密度按符号 + α 重建"""
    from schemas import MeasureDoc, build_symbol

    doc = MeasureDoc.model_validate(document)
    points = np.array([[complex(*c) for c in atom.point] for atom in doc.atoms], dtype=complex).reshape(-1, doc.dim)
    weights = np.array([complex(*atom.weight) for atom in doc.atoms], dtype=complex)
    density: Callable | None = None
    offset = 0.0
    if doc.density is not None and doc.density.formula == "uniform":
        density = lambda pts: np.ones(pts.shape[0])  # noqa: E731
    elif doc.density is not None:
        from clark import clark_ac_density

        phi = build_symbol(doc.density.symbol)
        alpha = complex(*doc.density.alpha)
        density = lambda pts: clark_ac_density(phi, alpha, pts)  # noqa: E731
        offset = 0.5
    return MeasureRep(
        dim=doc.dim,
        atom_points=points,
        atom_weights=weights,
        density=density,
        plan=plan,
        positive=doc.positive,
        node_offset=offset,
        density_tag=None if doc.density is None else doc.density.model_dump(mode="json", exclude_none=True),
    )
