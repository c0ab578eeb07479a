"""
本质范数模块 - ‖C_φ‖²_e 的三个估计量与一致性报告

    B̂_σ  = sup_α ‖σ_α^s‖                         α 网格上的最大奇异质量
    B̂_N  = limsup ∫ N_{φ_ζ}(w) dσ_d / (1 − |w|)    半径阶梯, 见 counting.bhat_N
    下界  = sup_α lim_{r→1} ‖f_{rα}∘φ‖²            f_b(w) = √(1−|b|²)/(1 − b̄w)

测试函数范数拆成两项:
    ‖f_{rα}∘φ‖² = J_r − K_r
    J_r = (1 − r²|φ(0)|²)/|α − rφ(0)|²           (平均值性质, 精确)
    K_r = r² ∫ (1 − |φ|²)/|α − rφ|² dσ_d          (内函数时为 0)
阶梯按 s = 1 − r 对最后三个半径做二次 Lagrange 外推到 s = 0。

报告只给出三个估计量和一致性结论, 开方 (‖C_φ‖_e) 由 CLI 展示层完成。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from clark import ClarkSampler, clark_masses, default_plan
from config import settings
from counting import LimsupEstimate, bhat_N
from errors import DivisionDegeneracyError, InvalidArgumentError, warn
from kernels import Estimate, SphereSamplePlan, adaptive_circle_mean, circle_nodes, sample_directions
from symbols import Symbol, refine_boundary_maximum
from workers import pool_map

MIN_ALPHA_NODES = 16
CANDIDATE_GAP = 5e-3
CONTACT_ACCEPT = 1e-9
MAX_INSERTED = 64
BOUNDARY_GRID = 4096
DEDUPE_TOL = 1e-12
TESTFN_OFFSET = 0.5


def _arg(alpha: complex) -> float:
    return float(np.mod(np.angle(alpha), 2.0 * np.pi))


# === α 网格 ===


@dataclass
class AlphaGrid:
    """均匀节点加上在边界接触值处插入的节点, 按辐角排序"""

    alphas: np.ndarray
    uniform: int
    inserted: list[complex] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "uniform": self.uniform,
            "inserted": [[a.real, a.imag] for a in self.inserted],
            "size": int(self.alphas.size),
        }


def _contact_candidates(phi: Symbol, seed: int) -> list[complex]:
    """|φ| 贴近 1 的边界点附近做局部极大化, 返回接触值 φ/|φ|"""
    if phi.is_constant:
        return []
    if phi.is_inner:
        c = phi.value_at_origin()
        return [c / abs(c)] if abs(c) > 0 else []

    if phi.dim == 1:
        points = circle_nodes(BOUNDARY_GRID).nodes.reshape(-1, 1)
        spacing = 8.0 * 2.0 * np.pi / BOUNDARY_GRID
    else:
        points = sample_directions(phi.dim, BOUNDARY_GRID, seed)
        spacing = 0.05
    try:
        values = np.abs(np.asarray(phi.boundary_eval(points)).reshape(-1))
    except DivisionDegeneracyError:
        warn("EssNorm", "boundary grid hit an exceptional point, no α nodes inserted")
        return []

    order = np.argsort(-values)
    starts: list[int] = []
    for i in order:
        if values[i] <= 1.0 - CANDIDATE_GAP and starts:
            break
        if any(np.linalg.norm(points[i] - points[j]) < spacing for j in starts):
            continue
        starts.append(int(i))
        if len(starts) >= MAX_INSERTED:
            break

    found: list[complex] = []
    for i in starts:
        witness, modulus = refine_boundary_maximum(phi, points[i], float(values[i]), BOUNDARY_GRID)
        if modulus < 1.0 - CONTACT_ACCEPT:
            continue
        value = complex(np.asarray(phi.boundary_eval(np.asarray(witness).reshape(1, -1))).reshape(-1)[0])
        found.append(value / abs(value))
    return found


def alpha_grid(phi: Symbol, nodes: int | None = None, seed: int | None = None) -> AlphaGrid:
    """n 个均匀节点 + 接触值插入 (去重, 至多 64 个)"""
    n = nodes or settings.alpha_nodes
    if n < MIN_ALPHA_NODES or n > settings.max_alpha_nodes:
        raise InvalidArgumentError(
            f"alpha nodes must lie in [{MIN_ALPHA_NODES}, {settings.max_alpha_nodes}]",
            module="essnorm",
            operation="alpha_grid",
            details={"nodes": n},
        )
    uniform = circle_nodes(n).nodes
    inserted: list[complex] = []
    for a in _contact_candidates(phi, settings.seed if seed is None else seed):
        if np.min(np.abs(uniform - a)) <= DEDUPE_TOL or any(abs(a - b) <= DEDUPE_TOL for b in inserted):
            continue
        inserted.append(a)
    alphas = np.concatenate([uniform, np.asarray(inserted, dtype=complex)])
    alphas = alphas[np.argsort([_arg(a) for a in alphas], kind="stable")]
    return AlphaGrid(alphas=alphas, uniform=n, inserted=inserted)


# === B̂_σ ===


@dataclass
class SigmaEstimate:
    value: float
    se: float
    argmax: complex
    table: list[tuple[float, float, float]]
    grid: AlphaGrid

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "se": self.se,
            "argmax": [self.argmax.real, self.argmax.imag],
            "per_alpha": [list(row) for row in self.table],
            "alpha_grid": self.grid.to_dict(),
        }


def bhat_sigma(
    phi: Symbol,
    alpha_nodes: int | None = None,
    plan: SphereSamplePlan | None = None,
    grid: AlphaGrid | None = None,
    sampler: ClarkSampler | None = None,
) -> SigmaEstimate:
    """α 网格上的 max ‖σ_α^s‖, 保留每个 α 的 (辐角, 质量, SE) 表"""
    grid = grid or alpha_grid(phi, alpha_nodes, plan.seed if plan else None)
    masses = clark_masses(phi, grid.alphas, plan, sampler)
    singular = np.array([total - ac.value for total, ac in masses])
    errors = np.array([ac.se for _, ac in masses])
    best = int(np.argmax(singular))
    table = [(_arg(a), float(m), float(e)) for a, m, e in zip(grid.alphas, singular, errors)]
    return SigmaEstimate(
        value=float(singular[best]),
        se=float(errors[best]),
        argmax=complex(grid.alphas[best]),
        table=table,
        grid=grid,
    )


# === 测试函数下界 ===


@dataclass
class RadialLadder:
    """b = rα 上的 ‖f_b∘φ‖² 阶梯"""

    alpha: complex
    radii: list[float]
    values: list[float]
    se: list[float]
    j_terms: list[float]
    k_terms: list[float]
    extrapolated: float
    extrapolated_se: float

    @property
    def at_largest(self) -> float:
        return self.values[-1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": _arg(self.alpha),
            "ladder": [[r, v] for r, v in zip(self.radii, self.values)],
            "se": list(self.se),
            "j": list(self.j_terms),
            "k": list(self.k_terms),
            "extrapolated": self.extrapolated,
        }


def extrapolate_to_boundary(radii, values, se=None) -> Estimate:
    """最后三个半径上按 s = 1 − r 的 Lagrange 插值在 s = 0 处的值"""
    s = 1.0 - np.asarray(radii, dtype=float)[-3:]
    v = np.asarray(values, dtype=float)[-3:]
    e = np.zeros_like(v) if se is None else np.asarray(se, dtype=float)[-3:]
    weights = np.ones_like(s)
    for i in range(s.size):
        for j in range(s.size):
            if i != j:
                weights[i] *= -s[j] / (s[i] - s[j])
    return Estimate(float(weights @ v), float(np.sqrt(np.sum((weights * e) ** 2))))


def _k_term(phi: Symbol, alpha: complex, r: float, sampler: ClarkSampler | None) -> Estimate:
    if phi.is_constant:
        c = phi.value_at_origin()
        return Estimate(r * r * (1.0 - abs(c) ** 2) / abs(alpha - r * c) ** 2, 0.0)
    if phi.is_inner and phi.dim == 1:
        return Estimate(0.0, 0.0)

    def integrand(values: np.ndarray) -> np.ndarray:
        return (1.0 - np.abs(values) ** 2) / np.abs(alpha - r * values) ** 2

    if sampler is not None:
        est = sampler.reduce(integrand(sampler.values))
        return Estimate(r * r * float(est.value), r * r * est.se)
    result = adaptive_circle_mean(
        lambda lam: integrand(np.asarray(phi.boundary_eval(lam.reshape(-1, 1))).reshape(-1)),
        start_nodes=settings.circle_nodes,
        max_nodes=settings.max_circle_nodes_d1,
        rtol=settings.quadrature_rtol,
        offset=TESTFN_OFFSET,
        atol=1e-15,
    )
    if result.capped:
        warn("EssNorm", f"K_r quadrature reached {result.node_count} nodes at r={r}, alpha={alpha:.6g}")
    return Estimate(r * r * float(result.means[0]), r * r * float(result.errors[0]))


def _check_radii(radii) -> list[float]:
    radii = [float(r) for r in (radii or settings.radii)]
    if not radii or any(not 0.0 < r < 1.0 for r in radii) or sorted(radii) != radii:
        raise InvalidArgumentError(
            "radii must be increasing and inside (0, 1)",
            module="essnorm",
            operation="testfn_lower_bound",
            details={"radii": radii},
        )
    return radii


def testfn_lower_bound(
    phi: Symbol,
    alpha,
    radii=None,
    plan: SphereSamplePlan | None = None,
    sampler: ClarkSampler | None = None,
) -> RadialLadder:
    """沿 b = rα 计算 ‖f_b∘φ‖² = J_r − K_r, 并外推到 r → 1"""
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-12:
        raise InvalidArgumentError(
            "alpha must be unimodular", module="essnorm", operation="testfn_lower_bound", details={"alpha": alpha}
        )
    radii = _check_radii(radii)
    if sampler is None and phi.dim > 1 and not phi.is_constant:
        sampler = ClarkSampler(phi, plan or default_plan(phi.dim))
    c = phi.value_at_origin()
    j_terms, k_terms, values, errors = [], [], [], []
    for r in radii:
        j = (1.0 - r * r * abs(c) ** 2) / abs(alpha - r * c) ** 2
        k = _k_term(phi, alpha, r, sampler)
        j_terms.append(float(j))
        k_terms.append(float(k.value))
        values.append(float(j - k.value))
        errors.append(float(k.se))
    limit = extrapolate_to_boundary(radii, values, errors)
    return RadialLadder(
        alpha=alpha,
        radii=radii,
        values=values,
        se=errors,
        j_terms=j_terms,
        k_terms=k_terms,
        extrapolated=float(limit.value),
        extrapolated_se=limit.se,
    )


@dataclass
class LowerBound:
    value: float
    se: float
    argmax: complex
    ladders: list[RadialLadder]

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "se": self.se,
            "argmax": [self.argmax.real, self.argmax.imag],
            "per_alpha_ladders": [ladder.to_dict() for ladder in self.ladders],
        }


def lower_bound(
    phi: Symbol,
    grid: AlphaGrid,
    radii=None,
    plan: SphereSamplePlan | None = None,
    sampler: ClarkSampler | None = None,
) -> LowerBound:
    """max(0, sup_α 外推值)"""
    radii = _check_radii(radii)
    if sampler is None and phi.dim > 1 and not phi.is_constant:
        sampler = ClarkSampler(phi, plan or default_plan(phi.dim))
    ladders = pool_map(lambda a: testfn_lower_bound(phi, a, radii, plan, sampler), list(grid.alphas))
    best = int(np.argmax([ladder.extrapolated for ladder in ladders]))
    top = ladders[best]
    return LowerBound(
        value=max(0.0, top.extrapolated),
        se=top.extrapolated_se,
        argmax=top.alpha,
        ladders=ladders,
    )


# === 报告 ===


@dataclass
class EssNormReport:
    sigma: SigmaEstimate
    counting: LimsupEstimate
    lower: LowerBound
    tolerance: float
    verdict: Literal["consistent", "inconsistent"]
    margins: dict[str, float]
    compact: bool
    grids: dict[str, Any] = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"

    @property
    def estimates(self) -> tuple[float, float, float]:
        return self.sigma.value, self.counting.estimate, self.lower.value

    def to_dict(self) -> dict[str, Any]:
        return {
            "bhat_sigma": self.sigma.to_dict(),
            "bhat_N": self.counting.to_dict(),
            "lower_bound": self.lower.to_dict(),
            "tolerances": {
                "verdict": self.tolerance,
                "relative": settings.verdict_rel_tol,
                "absolute": settings.verdict_abs_tol,
                "compact_threshold": settings.compact_threshold,
            },
            "verdict": self.verdict,
            "margins": self.margins,
            "compact": self.compact,
            "grids": self.grids,
        }


def judge(sigma: SigmaEstimate, counting: LimsupEstimate, lower: LowerBound) -> tuple[float, str, dict[str, float], bool]:
    """tol = max(rel·B̂_σ, 3·SE, abs); 一致 ⇔ 下界 ≤ B̂_σ + tol 且 |B̂_N − B̂_σ| ≤ band + tol"""
    se = max(sigma.se, lower.se, counting.se[-1] if counting.se else 0.0)
    tol = max(settings.verdict_rel_tol * abs(sigma.value), 3.0 * se, settings.verdict_abs_tol)
    gap = abs(counting.estimate - sigma.value)
    allowance = counting.band + tol
    consistent = lower.value <= sigma.value + tol and gap <= allowance
    margins = {
        "lower_minus_sigma": lower.value - sigma.value,
        "counting_gap": gap,
        "counting_allowance": allowance,
    }
    compact = max(sigma.value, counting.estimate, lower.value) <= settings.compact_threshold
    return tol, "consistent" if consistent else "inconsistent", margins, compact


def essential_norm_report(
    phi: Symbol,
    alpha_nodes: int | None = None,
    radii=None,
    angular: int | None = None,
    plan: SphereSamplePlan | None = None,
    seed: int | None = None,
    normalization: Literal["one_minus_r", "neg_log"] = "one_minus_r",
) -> EssNormReport:
    """三个估计量共用网格与随机种子, 顶层并行"""
    seed = settings.seed if seed is None else seed
    radii = _check_radii(radii)
    if phi.dim > 1 and plan is None:
        plan = default_plan(phi.dim, seed=seed)
    grid = alpha_grid(phi, alpha_nodes, seed)
    sampler = ClarkSampler(phi, plan) if phi.dim > 1 and not phi.is_constant else None
    counting_plan = None
    if phi.dim > 1:
        counting_plan = SphereSamplePlan.monte_carlo(phi.dim, min(settings.directions, plan.sample_count), seed)

    tasks = [
        lambda: bhat_sigma(phi, grid=grid, plan=plan, sampler=sampler),
        lambda: bhat_N(phi, radii, angular, counting_plan, normalization),
        lambda: lower_bound(phi, grid, radii, plan, sampler),
    ]
    sigma, counting, lower = pool_map(lambda task: task(), tasks)
    tol, verdict, margins, compact = judge(sigma, counting, lower)
    grids = {
        "alpha": grid.to_dict(),
        "radii": radii,
        "angular": angular or settings.angular_nodes,
        "plan": None if plan is None else plan.to_dict(),
        "counting_plan": None if counting_plan is None else counting_plan.to_dict(),
        "seed": seed,
    }
    return EssNormReport(
        sigma=sigma,
        counting=counting,
        lower=lower,
        tolerance=tol,
        verdict=verdict,
        margins=margins,
        compact=compact,
        grids=grids,
    )
