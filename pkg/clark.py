"""
Clark 测度模块 - σ_α[φ] 的质量、密度、精确原子与核恒等式校验

    total     = (1 − |φ(0)|²)/|α − φ(0)|²
    a.c. 密度 = (1 − |φ(ζ)|²)/|α − φ(ζ)|²
    singular  = total − ac        (只走质量差, 不对奇异集做求积)

d=1:
    Blaschke 积: σ_α 是 {φ = α} 上的原子测度, 权重 1/|φ′(ζ)|
    多项式/有理: a.c. 部分自适应求积, 接触点 φ(ζ) = α 上的原子同样权重 1/|φ′(ζ)|
d ≥ 2:
    a.c. 质量按采样方案估计 (ClarkSampler 缓存 φ 的边界值, 多个 α 共用)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.polynomial import polynomial as P

from config import settings
from errors import (
    ContactPointError,
    InvalidArgumentError,
    RootOffCircleError,
    UnsupportedSymbolError,
    warn,
)
from kernels import (
    BoundaryFunction,
    Estimate,
    SphereSamplePlan,
    adaptive_circle_mean,
    cauchy_kernel,
    circle_nodes,
    mc_mean,
    sample_directions,
    sample_sphere,
)
from measures import MeasureRep, cauchy_plus, distribution_tail, integrate, poisson_integral, stratified_circle_grid
from symbols import Symbol, trim_coefficients
from workers import pool_map

CONTACT_TOL = 1e-12
UNIMODULAR_TOL = 1e-12
ROOT_CIRCLE_TOL = 1e-8
CONTACT_SEARCH_TOL = 1e-6
CLUSTER_TOL = 1e-6
ATOM_BUDGET_TOL = 1e-8
DENSITY_OFFSET = 0.5


def _unimodular(alpha, operation: str) -> complex:
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > UNIMODULAR_TOL:
        raise InvalidArgumentError(
            "alpha must be unimodular", module="clark", operation=operation, details={"alpha": alpha}
        )
    return alpha


def default_plan(dim: int, samples: int | None = None, seed: int | None = None) -> SphereSamplePlan:
    return SphereSamplePlan.monte_carlo(
        dim, samples or settings.sphere_samples, settings.seed if seed is None else seed
    )


# === 质量与密度 ===


def clark_total_mass(phi: Symbol, alpha) -> float:
    """‖σ_α‖ = (1 − |φ(0)|²)/|α − φ(0)|²"""
    alpha = _unimodular(alpha, "clark_total_mass")
    c = phi.value_at_origin()
    return (1.0 - abs(c) ** 2) / abs(alpha - c) ** 2


def _density_from_values(values: np.ndarray, alpha: complex, points=None) -> np.ndarray:
    gap = np.abs(alpha - values)
    if np.any(gap < CONTACT_TOL):
        bad = int(np.argmin(gap))
        details: dict[str, Any] = {"alpha": alpha, "value": complex(values[bad])}
        if points is not None:
            details["point"] = np.asarray(points)[bad]
        raise ContactPointError(
            "phi(zeta) touches alpha", module="clark", operation="clark_ac_density", details=details
        )
    return (1.0 - np.abs(values) ** 2) / gap**2


def clark_ac_density(phi: Symbol, alpha, zeta) -> float | np.ndarray:
    """(1 − |φ(ζ)|²)/|α − φ(ζ)|²; ζ 为单点或形状 (N, d) 的点组"""
    alpha = _unimodular(alpha, "clark_ac_density")
    arr = np.asarray(zeta, dtype=complex)
    single = arr.ndim == 0 or (arr.ndim == 1 and phi.dim > 1)
    pts = arr.reshape(-1, phi.dim)
    values = np.asarray(phi.boundary_eval(pts)).reshape(-1)
    density = _density_from_values(values, alpha, pts)
    return float(density[0]) if single else density


class ClarkSampler:
    """d ≥ 2 的边界样本缓存: φ 只求值一次, 所有 α 共用同一组点"""

    def __init__(self, phi: Symbol, plan: SphereSamplePlan):
        if plan.dimension != phi.dim:
            raise InvalidArgumentError(
                "plan dimension differs from symbol dimension", module="clark", operation="ClarkSampler"
            )
        self.phi = phi
        self.plan = plan
        self.points = sample_sphere(plan)
        self.values = np.asarray(phi.boundary_eval(self.points)).reshape(-1)
        self.rows = plan.directions if plan.mode == "slice-product" else None

    def reduce(self, samples: np.ndarray) -> Estimate:
        """MC 方案取样本均值; 切片方案先按方向求圆周均值再对方向求均值"""
        samples = np.asarray(samples).reshape(-1)
        if self.rows is None:
            return mc_mean(samples)
        return mc_mean(samples.reshape(self.rows, -1).mean(axis=1))

    def density(self, alpha: complex) -> np.ndarray:
        return _density_from_values(self.values, alpha, self.points)

    def ac_mass(self, alpha: complex) -> Estimate:
        return self.reduce(self.density(alpha))


def _ac_mass_d1(phi: Symbol, alpha: complex) -> Estimate:
    result = adaptive_circle_mean(
        lambda lam: _density_from_values(np.asarray(phi.boundary_eval(lam.reshape(-1, 1))).reshape(-1), alpha),
        start_nodes=settings.circle_nodes,
        max_nodes=settings.max_circle_nodes_d1,
        rtol=settings.quadrature_rtol,
        offset=DENSITY_OFFSET,
        atol=1e-15,
    )
    if result.capped:
        warn("Clark", f"a.c. quadrature reached {result.node_count} nodes at alpha={alpha:.6g}")
    return Estimate(float(result.means[0]), float(result.errors[0]))


def _ac_mass(phi: Symbol, alpha: complex, sampler: ClarkSampler | None, plan: SphereSamplePlan | None) -> Estimate:
    if phi.is_constant:
        return Estimate(clark_total_mass(phi, alpha), 0.0)
    if phi.dim == 1:
        if phi.is_inner:
            return Estimate(0.0, 0.0)
        return _ac_mass_d1(phi, alpha)
    if sampler is None:
        sampler = ClarkSampler(phi, plan or default_plan(phi.dim))
    return sampler.ac_mass(alpha)


def clark_singular_mass(phi: Symbol, alpha, plan: SphereSamplePlan | None = None) -> Estimate:
    """total − ac, SE 来自 a.c. 求积"""
    alpha = _unimodular(alpha, "clark_singular_mass")
    ac = _ac_mass(phi, alpha, None, plan)
    return Estimate(clark_total_mass(phi, alpha) - ac.value, ac.se)


# === d=1 原子 ===


def _boundary_roots(p: np.ndarray, q: np.ndarray, alpha: complex) -> tuple[np.ndarray, np.ndarray]:
    """p − αq 的根 (Newton 修正三步), 同时返回多项式本身"""
    g = trim_coefficients(P.polysub(p, alpha * np.asarray(q)), 1e-14)
    if g.size < 2:
        return np.empty(0, dtype=complex), g
    roots = np.asarray(P.polyroots(g), dtype=complex)
    dg = P.polyder(g)
    for _ in range(3):
        slope = P.polyval(roots, dg)
        ok = np.abs(slope) > 0
        roots[ok] = roots[ok] - P.polyval(roots[ok], g) / slope[ok]
    return roots, g


def _warn_clusters(points: np.ndarray, operation: str) -> None:
    if points.size < 2:
        return
    dist = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(dist, np.inf)
    if np.min(dist) < CLUSTER_TOL:
        warn("Clark", f"{operation}: clustered roots (min separation {np.min(dist):.3g})")


def clark_atoms_d1(phi: Symbol, alpha) -> tuple[np.ndarray, np.ndarray]:
    """有限 Blaschke 积的 Clark 原子: φ(ζ) = α 的 n 个解, 权重 1/|φ′(ζ)|"""
    alpha = _unimodular(alpha, "clark_atoms_d1")
    b = phi.as_blaschke() if phi.dim == 1 else None
    if b is None:
        raise UnsupportedSymbolError(
            "clark_atoms_d1 needs a finite Blaschke product", module="clark", operation="clark_atoms_d1"
        )
    if b.degree > settings.max_atomic_degree:
        raise UnsupportedSymbolError(
            f"Blaschke degree {b.degree} above atomic cap {settings.max_atomic_degree}",
            module="clark",
            operation="clark_atoms_d1",
        )
    p, q = b.rational_parts()
    roots, _ = _boundary_roots(p, q, alpha)
    off = np.abs(np.abs(roots) - 1.0)
    if roots.size != b.degree or np.any(off > ROOT_CIRCLE_TOL):
        raise RootOffCircleError(
            "Clark atom off the unit circle",
            module="clark",
            operation="clark_atoms_d1",
            details={"deviation": float(np.max(off)) if off.size else None, "roots": roots},
        )
    points = roots / np.abs(roots)
    order = np.argsort(np.angle(points))
    points = points[order]
    _warn_clusters(points, "clark_atoms_d1")
    weights = 1.0 / np.abs(b._derivative(points))
    return points, weights


def clark_contact_atoms_d1(phi: Symbol, alpha) -> tuple[np.ndarray, np.ndarray]:
    """d=1 多项式/有理符号在接触点 φ(ζ) = α 上的原子, 权重为角导数的倒数"""
    alpha = _unimodular(alpha, "clark_contact_atoms_d1")
    if phi.dim != 1:
        raise UnsupportedSymbolError("contact atoms need d=1", module="clark", operation="clark_contact_atoms_d1")
    p, q = phi.rational_parts()
    roots, g = _boundary_roots(p, q, alpha)
    off = np.abs(np.abs(roots) - 1.0)
    near = off <= CONTACT_SEARCH_TOL
    loose = near & (off > ROOT_CIRCLE_TOL)
    if np.any(loose):
        warn("Clark", f"clark_contact_atoms_d1: dropped {int(loose.sum())} root(s) within 1e-6 of the circle")
    points = roots[near & ~loose]
    if points.size == 0:
        return np.empty(0, dtype=complex), np.empty(0)
    points = points / np.abs(points)
    points = points[np.argsort(np.angle(points))]
    _warn_clusters(points, "clark_contact_atoms_d1")
    slope = np.abs(np.asarray(phi.derivative1d(points.reshape(-1, 1))).reshape(-1))
    return points, 1.0 / slope


def _atoms_for(phi: Symbol, alpha: complex, notes: list[str]) -> tuple[np.ndarray, np.ndarray] | None:
    def note(message: str) -> None:
        notes.append(message)
        warn("Clark", message)

    if phi.is_inner:
        b = phi.as_blaschke()
        if b is None:
            note("singular inner factor: no finite atom list, mass budget only")
            return None
        if b.degree > settings.max_atomic_degree:
            note(f"Blaschke degree {b.degree} above {settings.max_atomic_degree}: density + budget route")
            return None
        return clark_atoms_d1(b, alpha)
    try:
        return clark_contact_atoms_d1(phi, alpha)
    except UnsupportedSymbolError as exc:
        note(f"contact atoms unavailable ({exc.message})")
        return None


# === ClarkData ===


@dataclass
class ClarkData:
    """(φ, α) 的 Clark 测度数据"""

    symbol: Symbol
    alpha: complex
    total_mass: float
    ac_mass: float
    ac_mass_se: float
    singular_mass: float
    atom_points: np.ndarray | None = None
    atom_weights: np.ndarray | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.symbol.dim

    @property
    def has_atoms(self) -> bool:
        return self.atom_points is not None

    @property
    def budget_ok(self) -> bool:
        """singular ≥ −3·SE"""
        return self.singular_mass >= -3.0 * self.ac_mass_se - 1e-10

    @property
    def atom_budget_gap(self) -> float | None:
        if self.atom_weights is None:
            return None
        return abs(float(np.sum(self.atom_weights)) - self.singular_mass)

    def density(self) -> BoundaryFunction | None:
        """a.c. 密度句柄 ζ ↦ (1 − |φ(ζ)|²)/|α − φ(ζ)|², d=1 内函数时为 None"""
        if self.symbol.is_inner and self.dim == 1:
            return None
        return lambda pts: clark_ac_density(self.symbol, self.alpha, pts)

    def measure(self, plan: SphereSamplePlan | None = None) -> MeasureRep:
        """原子 + a.c. 密度组成的 MeasureRep (d ≥ 2 时不含奇异部分)"""
        from schemas import symbol_document

        points = np.empty((0, self.dim), dtype=complex) if self.atom_points is None else self.atom_points
        weights = np.empty(0) if self.atom_weights is None else self.atom_weights
        density = self.density()
        return MeasureRep(
            dim=self.dim,
            atom_points=points.reshape(-1, self.dim),
            atom_weights=weights,
            density=density,
            plan=None if self.dim == 1 else (plan or default_plan(self.dim)),
            node_offset=DENSITY_OFFSET,
            density_tag=None
            if density is None
            else {
                "formula": "clark-ac",
                "symbol": symbol_document(self.symbol),
                "alpha": [self.alpha.real, self.alpha.imag],
            },
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "alpha": [self.alpha.real, self.alpha.imag],
            "total_mass": self.total_mass,
            "ac_mass": self.ac_mass,
            "ac_mass_se": self.ac_mass_se,
            "singular_mass": self.singular_mass,
        }
        if self.atom_points is not None:
            out["atoms"] = [
                [float(z.real), float(z.imag), float(w)] for z, w in zip(self.atom_points, self.atom_weights)
            ]
            out["atom_budget_gap"] = self.atom_budget_gap
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


def clark_data(
    phi: Symbol,
    alpha,
    plan: SphereSamplePlan | None = None,
    sampler: ClarkSampler | None = None,
) -> ClarkData:
    """计算 (φ, α) 的全部 Clark 数据"""
    alpha = _unimodular(alpha, "clark_data")
    total = clark_total_mass(phi, alpha)
    ac = _ac_mass(phi, alpha, sampler, plan)
    data = ClarkData(
        symbol=phi,
        alpha=alpha,
        total_mass=total,
        ac_mass=float(ac.value),
        ac_mass_se=float(ac.se),
        singular_mass=total - float(ac.value),
    )
    if phi.dim == 1 and not phi.is_constant:
        atoms = _atoms_for(phi, alpha, data.warnings)
        if atoms is not None:
            data.atom_points, data.atom_weights = atoms
            gap = data.atom_budget_gap
            if gap is not None and gap > ATOM_BUDGET_TOL + 3.0 * data.ac_mass_se:
                message = f"atom weights miss the singular mass by {gap:.3g}"
                data.warnings.append(message)
                warn("Clark", message)
    return data


def clark_masses(
    phi: Symbol,
    alphas,
    plan: SphereSamplePlan | None = None,
    sampler: ClarkSampler | None = None,
) -> list[tuple[float, Estimate]]:
    """一组 α 上的 (总质量, a.c. 质量); 不求原子"""
    alphas = [_unimodular(a, "clark_masses") for a in alphas]
    if phi.dim > 1 and not phi.is_constant:
        sampler = sampler or ClarkSampler(phi, plan or default_plan(phi.dim))
        return [(clark_total_mass(phi, a), sampler.ac_mass(a)) for a in alphas]
    return pool_map(lambda a: (clark_total_mass(phi, a), _ac_mass(phi, a, None, None)), alphas)


def clark_family(phi: Symbol, alphas, plan: SphereSamplePlan | None = None) -> list[ClarkData]:
    """一组 α 上的 ClarkData; d ≥ 2 共用一个 ClarkSampler"""
    alphas = [complex(a) for a in alphas]
    if phi.dim == 1 or phi.is_constant:
        return pool_map(lambda a: clark_data(phi, a, plan), alphas)
    sampler = ClarkSampler(phi, plan or default_plan(phi.dim))
    return [clark_data(phi, a, sampler=sampler) for a in alphas]


def slice_singular_mass(phi: Symbol, alpha, plan: SphereSamplePlan | None = None) -> Estimate:
    """切片测度路线: 对方向平均切片 φ_ζ 在接触点上的原子质量"""
    alpha = _unimodular(alpha, "slice_singular_mass")
    if phi.dim == 1:
        if phi.is_inner:
            return Estimate(clark_total_mass(phi, alpha), 0.0)
        _, weights = clark_contact_atoms_d1(phi, alpha)
        return Estimate(float(np.sum(weights)), 0.0)
    if phi.is_constant:
        return Estimate(0.0, 0.0)
    count = plan.directions if plan is not None and plan.directions else settings.directions
    seed = plan.seed if plan is not None else settings.seed
    dirs = sample_directions(phi.dim, count, seed)
    num, den = phi.slice_parts(dirs)
    masses = np.zeros(count)
    for i in range(count):
        p, q = trim_coefficients(num[i]), trim_coefficients(den[i])
        roots, _ = _boundary_roots(p, q, alpha)
        keep = np.abs(np.abs(roots) - 1.0) <= ROOT_CIRCLE_TOL
        if not np.any(keep):
            continue
        zeta = roots[keep] / np.abs(roots[keep])
        qv = P.polyval(zeta, q)
        slope = (P.polyval(zeta, P.polyder(p)) * qv - P.polyval(zeta, p) * P.polyval(zeta, P.polyder(q))) / qv**2
        masses[i] = float(np.sum(1.0 / np.abs(slope)))
    return mc_mean(masses)


# === 恒等式校验 ===


def herglotz_real_part(phi: Symbol, alpha, z) -> float:
    """Re((α + φ(z))/(α − φ(z)))"""
    v = complex(phi.eval(z))
    return float(((alpha + v) / (alpha - v)).real)


def cauchy_plus_closed_form(phi: Symbol, alpha, z) -> complex:
    """(σ_α)₊(z) = 1/(1 − ᾱφ(z)) + α·conj(φ(0))/(1 − α·conj(φ(0)))"""
    alpha = _unimodular(alpha, "cauchy_plus_closed_form")
    v = complex(phi.eval(z))
    c0 = np.conj(phi.value_at_origin())
    return complex(1.0 / (1.0 - np.conj(alpha) * v) + alpha * c0 / (1.0 - alpha * c0))


def verify_cauchy_plus(phi: Symbol, alpha, data: ClarkData, points, plan: SphereSamplePlan | None = None) -> Estimate:
    """max_z |(σ_α)₊(z) − 闭式|"""
    alpha = _unimodular(alpha, "verify_cauchy_plus")
    mu = data.measure(plan)
    residuals = []
    for z in points:
        est = cauchy_plus(mu, z)
        residuals.append(Estimate(complex(est.value) - cauchy_plus_closed_form(phi, alpha, z), est.se))
    return _worst(residuals)


def _worst(residuals: list[Estimate]) -> Estimate:
    if not residuals:
        return Estimate(0.0, 0.0)
    best = max(residuals, key=lambda e: abs(e.value))
    return Estimate(float(abs(best.value)), float(best.se))


def verify_herglotz(phi: Symbol, alpha, data: ClarkData, points, plan: SphereSamplePlan | None = None) -> Estimate:
    """max_z |P[σ_α](z) − Re((α+φ(z))/(α−φ(z)))|"""
    alpha = _unimodular(alpha, "verify_herglotz")
    mu = data.measure(plan)
    residuals = []
    for z in points:
        est = poisson_integral(mu, z)
        residuals.append(Estimate(float(est.value) - herglotz_real_part(phi, alpha, z), est.se))
    return _worst(residuals)


def double_cauchy_rhs(phi: Symbol, alpha, z, w) -> complex:
    """(1 − φ(z)·conj φ(w)) / ((1 − ᾱφ(z))(1 − α·conj φ(w))) · C(z, w)"""
    fz = complex(phi.eval(z))
    fw = complex(phi.eval(w))
    ratio = (1.0 - fz * np.conj(fw)) / ((1.0 - np.conj(alpha) * fz) * (1.0 - alpha * np.conj(fw)))
    return complex(ratio * cauchy_kernel(z, w, phi.dim))


def verify_double_cauchy(phi: Symbol, alpha, data: ClarkData, pairs, plan: SphereSamplePlan | None = None) -> Estimate:
    """max |∫ C(z,ζ) C(ζ,w) dσ_α(ζ) − 右端闭式|"""
    alpha = _unimodular(alpha, "verify_double_cauchy")
    mu = data.measure(plan)
    residuals = []
    for z, w in pairs:
        lhs = integrate(
            mu, lambda pts, z=z, w=w: cauchy_kernel(z, pts, phi.dim) * cauchy_kernel(pts, w, phi.dim)
        )
        residuals.append(Estimate(complex(lhs.value) - double_cauchy_rhs(phi, alpha, z, w), lhs.se))
    return _worst(residuals)


# === 分解 (disintegration) ===


@dataclass
class DisintegrationResult:
    lhs: Estimate
    rhs: Estimate
    residual: Estimate
    alpha_nodes: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs.to_dict(),
            "residual": self.residual.to_dict(),
            "alpha_nodes": self.alpha_nodes,
        }


def _clark_integral_d1(phi: Symbol, alpha: complex, f: BoundaryFunction) -> Estimate:
    """∫ f dσ_α (d=1): 原子求和 + 密度的自适应求积"""
    notes: list[str] = []
    if phi.is_constant:
        atoms = None
    else:
        atoms = _atoms_for(phi, alpha, notes)
        if atoms is None:
            raise UnsupportedSymbolError(
                notes[-1] if notes else "no atom list", module="clark", operation="disintegration_check"
            )
    atom_part = 0j
    if atoms is not None and atoms[0].size:
        atom_part = complex(np.sum(atoms[1] * np.asarray(f(atoms[0].reshape(-1, 1))).reshape(-1)))
    if phi.dim == 1 and phi.is_inner:
        return Estimate(atom_part, 0.0)

    def integrand(lam: np.ndarray) -> np.ndarray:
        pts = lam.reshape(-1, 1)
        values = np.asarray(phi.boundary_eval(pts)).reshape(-1)
        return _density_from_values(values, alpha) * np.asarray(f(pts)).reshape(-1)

    result = adaptive_circle_mean(
        integrand,
        start_nodes=settings.circle_nodes,
        max_nodes=settings.max_circle_nodes_d1,
        rtol=settings.quadrature_rtol,
        offset=DENSITY_OFFSET,
        atol=1e-15,
    )
    return Estimate(atom_part + complex(result.means[0]), float(result.errors[0]))


# 分解检查用的测试函数, None 表示 f ≡ 1
DISINTEGRATION_TESTS: dict[str, BoundaryFunction | None] = {
    "one": None,
    "re_z1": lambda pts: np.real(np.asarray(pts)[:, 0]),
    "abs_z1_sq": lambda pts: np.abs(np.asarray(pts)[:, 0]) ** 2,
}


def disintegration_check(
    phi: Symbol,
    f: BoundaryFunction | None = None,
    alpha_nodes: int | None = None,
    plan: SphereSamplePlan | None = None,
) -> DisintegrationResult:
    """(1/n) Σ_k ∫ f dσ_{α_k} 对比 ∫ f dσ_d; f=None 表示 f ≡ 1"""
    n = alpha_nodes or settings.alpha_nodes
    alphas = circle_nodes(n).nodes

    if f is None:
        masses = np.array([clark_total_mass(phi, a) for a in alphas])
        lhs = float(masses.mean())
        return DisintegrationResult(Estimate(lhs, 0.0), Estimate(1.0, 0.0), Estimate(abs(lhs - 1.0), 0.0), n)

    if phi.dim == 1:
        parts = pool_map(lambda a: _clark_integral_d1(phi, complex(a), f), list(alphas))
        lhs_value = complex(np.mean([p.value for p in parts]))
        lhs_se = float(np.max([p.se for p in parts]))
        rhs_result = adaptive_circle_mean(
            lambda lam: np.asarray(f(lam.reshape(-1, 1))).reshape(-1),
            start_nodes=settings.circle_nodes,
            max_nodes=settings.max_circle_nodes_d1,
            rtol=settings.quadrature_rtol,
            atol=1e-15,
        )
        rhs = Estimate(complex(rhs_result.means[0]), float(rhs_result.errors[0]))
        lhs = Estimate(lhs_value, lhs_se)
        gap = lhs - rhs
        return DisintegrationResult(lhs, rhs, Estimate(abs(gap.value), gap.se), n)

    sampler = ClarkSampler(phi, plan or default_plan(phi.dim))
    fvals = np.asarray(f(sampler.points)).reshape(-1)
    averaged = np.zeros(sampler.values.shape)
    for a in alphas:
        averaged += sampler.density(a)
    averaged /= n
    lhs = sampler.reduce(fvals * averaged)
    rhs = sampler.reduce(fvals)
    residual = sampler.reduce(fvals * (averaged - 1.0))
    return DisintegrationResult(lhs, rhs, Estimate(abs(residual.value), residual.se), n)


# === Poltoratski 分布尾部 ===


@dataclass
class PoltoratskiResult:
    alpha: complex
    rows: list[tuple[float, float, float]]
    target: Estimate
    nodes: int
    weak_rows: list[tuple[float, complex, float]] | None = None
    weak_target: complex | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "alpha": [self.alpha.real, self.alpha.imag],
            "table": [[y, v, se] for y, v, se in self.rows],
            "target_singular_mass": self.target.to_dict(),
            "nodes": self.nodes,
        }
        if self.weak_rows is not None:
            out["weak_table"] = [[y, [complex(v).real, complex(v).imag], se] for y, v, se in self.weak_rows]
            out["weak_target"] = [complex(self.weak_target).real, complex(self.weak_target).imag]
        return out


def boundary_cauchy_closed_form(phi: Symbol, alpha: complex, points: np.ndarray) -> np.ndarray:
    """边界上的 |(σ_α)₊|, 由 φ 的边界值经闭式得到"""
    values = np.asarray(phi.boundary_eval(points)).reshape(-1)
    c0 = np.conj(phi.value_at_origin())
    with np.errstate(divide="ignore", invalid="ignore"):
        plus = 1.0 / (1.0 - np.conj(alpha) * values) + alpha * c0 / (1.0 - alpha * c0)
    return np.where(np.isfinite(plus), np.abs(plus), np.inf)


def poltoratski_check(
    phi: Symbol,
    alpha,
    ys,
    plan: SphereSamplePlan | None = None,
    test_function: BoundaryFunction | None = None,
    base_cells: int = 2**16,
) -> PoltoratskiResult:
    """π·y·σ_d({|μ₊| > y}) 的表, 目标值为奇异质量"""
    alpha = _unimodular(alpha, "poltoratski_check")
    ys = [float(y) for y in ys]
    if not ys or min(ys) <= 0:
        raise InvalidArgumentError("y grid must be positive", module="clark", operation="poltoratski_check")
    data = clark_data(phi, alpha, plan)
    target = Estimate(data.singular_mass, data.ac_mass_se)

    if phi.dim == 1:
        mids = np.exp(2j * np.pi * (np.arange(base_cells) + 0.5) / base_cells).reshape(-1, 1)
        coarse = boundary_cauchy_closed_form(phi, alpha, mids)
        hot_points = data.atom_points if data.atom_points is not None else np.empty(0, dtype=complex)
        points, weights = stratified_circle_grid(
            hot_points, base_cells, hot_cells=coarse > 0.5 * min(ys)
        )
        points = points.reshape(-1, 1)
    else:
        sampler = ClarkSampler(phi, plan or default_plan(phi.dim))
        points = sampler.points
        weights = np.full(points.shape[0], 1.0 / points.shape[0])
    modulus = boundary_cauchy_closed_form(phi, alpha, points)

    rows = []
    for y in ys:
        est = distribution_tail(modulus, weights, y)
        rows.append((y, float(np.pi * y * est.value), float(np.pi * y * est.se)))

    weak_rows = None
    weak_target = None
    if test_function is not None:
        fvals = np.asarray(test_function(points)).reshape(-1)
        weak_rows = []
        for y in ys:
            est = distribution_tail(modulus, weights, y, test_values=fvals)
            weak_rows.append((y, complex(np.pi * y * est.value), float(np.pi * y * est.se)))
        weak_target = 0j
        if data.atom_points is not None and data.atom_points.size:
            atom_f = np.asarray(test_function(data.atom_points.reshape(-1, phi.dim))).reshape(-1)
            weak_target = complex(np.sum(data.atom_weights * atom_f))
    return PoltoratskiResult(
        alpha=alpha,
        rows=rows,
        target=target,
        nodes=int(points.shape[0]),
        weak_rows=weak_rows,
        weak_target=weak_target,
    )


def rotation_pair(phi: Symbol, alpha, theta: float) -> tuple[Symbol, complex]:
    """(e^{iθ}φ, e^{iθ}α)"""
    rot = complex(np.exp(1j * theta))
    return phi.scale(rot), complex(alpha) * rot
