"""
计数函数模块 - 切片的 Nevanlinna 计数函数、球面积分、Jensen 上界与 Stanton 恒等式

    N_{φ_ζ}(w) = Σ_{φ_ζ(z) = w, |z| < 1} log(1/|z|)     (按重数)
    Ñ(w)       = ∫ log|ψ_w(φ_ζ(ξ))| dσ_1 + log(1/|ψ_w(φ_ζ(0))|),   ψ_w(λ) = (w − λ)/(1 − w̄λ)

求根统一走批量的反向伴随矩阵: u = 1/z, 首项系数 p(0) − w·q(0) 非零,
所以伴随矩阵总是良定义的, |u| > 1 的特征值对应圆盘内的根。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from numpy.polynomial import polynomial as P

from config import settings
from errors import (
    ConstantSliceError,
    ExcludedTargetError,
    RootResidualError,
    SliceFailureRateError,
    warn,
)
from kernels import (
    DiskGrid,
    Estimate,
    SphereSamplePlan,
    adaptive_circle_mean,
    mc_mean,
    sample_ball,
    sample_directions,
)
from symbols import Symbol, trim_coefficients

DISK_MARGIN = 1e-12
EXCLUDED_TOL = 1e-12
RESIDUAL_TOL = 1e-8
CLUSTER_TOL = 1e-6
MAX_FAILURE_RATE = 1e-3
MAJORANT_OFFSET = 0.5


# === 批量求根 ===


def _polyval_rows(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """逐行 Horner: coeffs (m, k) 升幂, x (m, n)"""
    out = np.zeros(x.shape, dtype=complex)
    for k in range(coeffs.shape[1] - 1, -1, -1):
        out = out * x + coeffs[:, k : k + 1]
    return out


def _derivative_rows(coeffs: np.ndarray) -> np.ndarray:
    k = coeffs.shape[1]
    if k == 1:
        return np.zeros_like(coeffs)
    return coeffs[:, 1:] * np.arange(1, k)[None, :]


def _pad(a: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros((a.shape[0], width), dtype=complex)
    out[:, : a.shape[1]] = a
    return out


@dataclass
class RowRoots:
    """每行 p − w·q 在圆盘内的根"""

    roots: np.ndarray  # (m, n), 无效位置为 nan
    counts: np.ndarray  # (m,) N 值
    ok: np.ndarray  # (m,) 求根成功
    excluded: np.ndarray  # (m,) w ≈ φ_ζ(0)
    constant: np.ndarray  # (m,) 常数切片
    residual: np.ndarray  # (m,) 最大根残差


def disk_roots(num: np.ndarray, den: np.ndarray, targets: np.ndarray) -> RowRoots:
    """批量求解 p_i(z) = w_i q_i(z), 只保留 |z| < 1 − 1e−12 的根"""
    num = np.atleast_2d(np.asarray(num, dtype=complex))
    den = np.atleast_2d(np.asarray(den, dtype=complex))
    targets = np.asarray(targets, dtype=complex).reshape(-1)
    m = targets.size
    width = max(num.shape[1], den.shape[1])
    num, den = _pad(num, width), _pad(den, width)
    g = num - targets[:, None] * den
    scale = np.max(np.abs(g), axis=1)

    excluded = np.abs(g[:, 0] / den[:, 0]) < EXCLUDED_TOL
    constant = np.all(np.abs(g[:, 1:]) <= 1e-14 * np.maximum(scale, 1e-300)[:, None], axis=1) if width > 1 else np.ones(m, bool)
    degree = width - 1
    while degree > 0 and np.all(np.abs(g[:, degree]) <= 1e-14 * np.maximum(scale, 1e-300)):
        degree -= 1

    roots = np.full((m, max(degree, 1)), np.nan + 0j)
    counts = np.zeros(m)
    residual = np.zeros(m)
    ok = ~(excluded | constant)
    if degree == 0 or not np.any(ok):
        return RowRoots(roots, counts, ok, excluded, constant, residual)

    rows = np.flatnonzero(ok)
    gk = g[rows, : degree + 1]
    lead = gk[:, 0]
    # 反向多项式 Σ g_k u^{n−k} 的伴随矩阵
    companion = np.zeros((rows.size, degree, degree), dtype=complex)
    companion[:, 0, :] = -gk[:, 1:] / lead[:, None]
    if degree > 1:
        idx = np.arange(1, degree)
        companion[:, idx, idx - 1] = 1.0
    u = np.linalg.eigvals(companion)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(np.abs(u) > 0, 1.0 / u, np.inf)

    dg = _derivative_rows(gk)
    for _ in range(2):
        finite = np.isfinite(z) & (np.abs(z) < 2.0)
        zz = np.where(finite, z, 0.0)
        slope = _polyval_rows(dg, zz)
        step = np.where(finite & (np.abs(slope) > 0), _polyval_rows(gk, zz) / np.where(slope == 0, 1, slope), 0.0)
        z = np.where(finite, z - step, z)

    inside = np.isfinite(z) & (np.abs(z) < 1.0 - DISK_MARGIN)
    zz = np.where(inside, z, 0.0)
    values = _polyval_rows(num[rows], zz) / _polyval_rows(den[rows], zz)
    err = np.where(inside, np.abs(values - targets[rows, None]), 0.0)
    row_residual = err.max(axis=1) if err.shape[1] else np.zeros(rows.size)
    with np.errstate(divide="ignore"):
        logs = np.where(inside, -np.log(np.where(inside, np.abs(z), 1.0)), 0.0)

    counts[rows] = logs.sum(axis=1)
    residual[rows] = row_residual
    roots[rows, : z.shape[1]] = np.where(inside, z, np.nan)
    good = row_residual <= RESIDUAL_TOL
    ok[rows[~good]] = False
    return RowRoots(roots, counts, ok, excluded, constant, residual)


def _check_failure_rate(failed: int, total: int, operation: str) -> None:
    if failed == 0:
        return
    rate = failed / max(total, 1)
    if rate > MAX_FAILURE_RATE:
        raise SliceFailureRateError(
            f"{failed} of {total} slices failed ({rate:.2%})",
            module="counting",
            operation=operation,
            details={"failed": failed, "total": total},
        )
    warn("Counting", f"{operation}: skipped {failed} of {total} slices")


def _cluster(roots: np.ndarray) -> list[tuple[complex, int]]:
    out: list[tuple[complex, int]] = []
    remaining = [complex(z) for z in roots if np.isfinite(z)]
    while remaining:
        head = remaining.pop(0)
        group = [head] + [z for z in remaining if abs(z - head) < CLUSTER_TOL]
        remaining = [z for z in remaining if abs(z - head) >= CLUSTER_TOL]
        out.append((complex(np.mean(group)), len(group)))
    return out


# === 单个切片 ===


@dataclass
class CountingSample:
    """N_{φ_ζ}(w) 与圆盘内的根"""

    w: complex
    value: float
    roots: list[tuple[complex, int]] = field(default_factory=list)
    residual: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "w": [self.w.real, self.w.imag],
            "value": self.value,
            "roots": [[z.real, z.imag, m] for z, m in self.roots],
            "residual": self.residual,
        }


def _slice_of(phi: Symbol, zeta) -> Symbol:
    if phi.dim == 1 and np.allclose(np.asarray(zeta, dtype=complex).reshape(-1), [1.0]):
        return phi
    return phi.slice(zeta)


def slice_counting(phi: Symbol, zeta, w) -> CountingSample:
    """N_{φ_ζ}(w) = Σ log(1/|z|) over φ_ζ(z) = w, |z| < 1"""
    w = complex(w)
    sl = _slice_of(phi, zeta)
    if sl.is_constant:
        raise ConstantSliceError("slice is constant", module="counting", operation="slice_counting")
    c0 = sl.value_at_origin()
    if abs(w - c0) < EXCLUDED_TOL:
        raise ExcludedTargetError(
            "target equals phi_zeta(0)", module="counting", operation="slice_counting", details={"w": w}
        )
    p, q = sl.rational_parts()
    found = disk_roots(p.reshape(1, -1), q.reshape(1, -1), np.array([w]))
    if not found.ok[0]:
        raise RootResidualError(
            "root residual above 1e-8",
            module="counting",
            operation="slice_counting",
            details={"w": w, "residual": float(found.residual[0])},
        )
    return CountingSample(
        w=w,
        value=float(found.counts[0]),
        roots=_cluster(found.roots[0]),
        residual=float(found.residual[0]),
    )


# === 球面积分 ===


def _direction_count(plan: SphereSamplePlan | None) -> tuple[int, int]:
    if plan is None:
        return settings.directions, settings.seed
    return (plan.directions or plan.sample_count), plan.seed


def integrated_counting(phi: Symbol, w, plan: SphereSamplePlan | None = None) -> Estimate:
    """∫_S N_{φ_ζ}(w) dσ_d(ζ); d=1 时就是 slice_counting"""
    w = complex(w)
    if phi.is_constant:
        return Estimate(0.0, 0.0)
    if abs(w - phi.value_at_origin()) < EXCLUDED_TOL:
        raise ExcludedTargetError(
            "target equals phi(0)", module="counting", operation="integrated_counting", details={"w": w}
        )
    if phi.dim == 1:
        return Estimate(slice_counting(phi, 1.0, w).value, 0.0)
    count, seed = _direction_count(plan)
    dirs = sample_directions(phi.dim, count, seed)
    num, den = phi.slice_parts(dirs)
    found = disk_roots(num, den, np.full(count, w))
    ok = found.ok | (found.constant & ~found.excluded)
    _check_failure_rate(int(np.sum(~ok)), count, "integrated_counting")
    return mc_mean(found.counts[ok])


def _boundary_slice_values(sl: Symbol, nodes: np.ndarray) -> np.ndarray:
    return np.asarray(sl.boundary_eval(nodes.reshape(-1, 1))).reshape(-1)


def majorant(phi: Symbol, zeta, w, nodes: int | None = None) -> float:
    """Ñ(w) = ∫ log|ψ_w(φ_ζ(ξ))| dσ_1(ξ) + log(1/|ψ_w(φ_ζ(0))|)"""
    w = complex(w)
    sl = _slice_of(phi, zeta)
    c0 = sl.value_at_origin()
    if abs(w - c0) < EXCLUDED_TOL:
        raise ExcludedTargetError("target equals phi_zeta(0)", module="counting", operation="majorant", details={"w": w})

    def psi(lam: np.ndarray) -> np.ndarray:
        return (w - lam) / (1.0 - np.conj(w) * lam)

    if sl.is_inner:
        boundary = 0.0
    else:
        result = adaptive_circle_mean(
            lambda xi: np.log(np.abs(psi(_boundary_slice_values(sl, xi)))),
            start_nodes=nodes or settings.circle_nodes,
            max_nodes=settings.max_circle_nodes,
            rtol=settings.quadrature_rtol,
            offset=MAJORANT_OFFSET,
            atol=1e-14,
        )
        if result.capped:
            warn("Counting", f"majorant quadrature reached {result.node_count} nodes at w={w:.6g}")
        boundary = float(result.means[0])
    return boundary - float(np.log(np.abs(psi(np.array([c0])))[0]))


@dataclass
class BoundCheck:
    """随机 (ζ, w) 上的 N ≤ Ñ; 内函数切片上两者相等"""

    samples: int
    max_excess: float
    equality_gap: float | None
    skipped: int
    tolerance: float = RESIDUAL_TOL

    @property
    def passed(self) -> bool:
        if self.max_excess > self.tolerance:
            return False
        return self.equality_gap is None or self.equality_gap <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "max_excess": self.max_excess,
            "equality_gap": self.equality_gap,
            "skipped": self.skipped,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def jensen_bound_check(phi: Symbol, samples: int = 1000, seed: int | None = None, nodes: int | None = None) -> BoundCheck:
    """N_{φ_ζ}(w) − Ñ(w) 的最大值; 常数切片与 w = φ_ζ(0) 跳过"""
    seed = settings.seed if seed is None else seed
    if phi.dim == 1:
        dirs = np.ones((samples, 1), dtype=complex)
    else:
        dirs = sample_directions(phi.dim, samples, seed)
    targets = sample_ball(1, samples, seed + 1, max_radius=0.95)[:, 0]
    excess, gaps = [], []
    skipped = 0
    for zeta, w in zip(dirs, targets):
        try:
            n_value = slice_counting(phi, zeta, w).value
            bound = majorant(phi, zeta, w, nodes)
        except (ConstantSliceError, ExcludedTargetError):
            skipped += 1
            continue
        excess.append(n_value - bound)
        if _slice_of(phi, zeta).is_inner:
            gaps.append(abs(n_value - bound))
    if skipped:
        warn("Counting", f"jensen_bound_check: skipped {skipped} of {samples} samples")
    return BoundCheck(
        samples=samples,
        max_excess=float(max(excess)) if excess else 0.0,
        equality_gap=float(max(gaps)) if gaps else None,
        skipped=skipped,
    )


# === Stanton / Littlewood–Paley ===


@dataclass
class IdentityCheck:
    """lhs/rhs/residual 三元组, residual 的 SE 含网格误差"""

    lhs: Estimate
    rhs: Estimate
    residual: Estimate
    grid: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs.to_dict(),
            "residual": self.residual.to_dict(),
            "grid": self.grid,
        }


def _compose(f: np.ndarray, p: np.ndarray) -> np.ndarray:
    out = np.array([f[-1]], dtype=complex)
    for c in f[-2::-1]:
        out = P.polyadd(P.polymul(out, p), [c])
    return np.asarray(out, dtype=complex)


def _slice_h2_norm(f: np.ndarray, num: np.ndarray, den: np.ndarray) -> float:
    q = trim_coefficients(den)
    if q.size == 1:
        comp = _compose(f, trim_coefficients(num) / q[0])
        return float(np.sum(np.abs(comp) ** 2))
    result = adaptive_circle_mean(
        lambda xi: np.abs(P.polyval(P.polyval(xi, num) / P.polyval(xi, den), f)) ** 2,
        start_nodes=settings.circle_nodes,
        max_nodes=settings.max_circle_nodes,
        rtol=settings.quadrature_rtol,
    )
    return float(result.means[0])


def _disk_term(f_prime: np.ndarray, num: np.ndarray, den: np.ndarray, grid: DiskGrid) -> tuple[float, int]:
    points, weights = grid.nodes()
    found = disk_roots(np.tile(num, (points.size, 1)), np.tile(den, (points.size, 1)), points)
    bad = ~found.ok & ~found.excluded
    values = np.abs(P.polyval(points, f_prime)) ** 2 * found.counts
    return float(2.0 * np.sum(weights[~bad] * values[~bad])), int(bad.sum())


def stanton_check(
    f,
    phi: Symbol,
    plan: SphereSamplePlan | None = None,
    grid: DiskGrid | None = None,
) -> IdentityCheck:
    """‖f∘φ‖² 对比 |f(φ(0))|² + 2∫|f′|² ∫N dσ dA, 逐方向使用同一批切片"""
    f = np.asarray(f, dtype=complex).reshape(-1)
    f_prime = P.polyder(f) if f.size > 1 else np.zeros(1, dtype=complex)
    c0 = phi.value_at_origin()
    grid = grid or DiskGrid(settings.disk_radial, settings.disk_angular, center=c0)
    coarse = grid.coarse()
    head = float(abs(P.polyval(c0, f)) ** 2)

    if phi.dim == 1:
        dirs = np.ones((1, 1), dtype=complex)
    else:
        count = plan.directions if plan is not None and plan.directions else settings.stanton_directions
        seed = plan.seed if plan is not None else settings.seed
        dirs = sample_directions(phi.dim, count, seed)
    if phi.is_constant:
        num = np.full((dirs.shape[0], 1), c0)
        den = np.ones((dirs.shape[0], 1), dtype=complex)
    else:
        num, den = (phi.rational_parts() if phi.dim == 1 else phi.slice_parts(dirs))
        num, den = np.atleast_2d(num), np.atleast_2d(den)

    lhs_rows, rhs_rows, gaps = [], [], []
    failed = 0
    for i in range(dirs.shape[0]):
        p, q = num[i], den[i]
        lhs_rows.append(_slice_h2_norm(f, p, q))
        if phi.is_constant or f.size == 1:
            rhs_rows.append(head)
            gaps.append(0.0)
            continue
        full, bad_full = _disk_term(f_prime, p, q, grid)
        half, bad_half = _disk_term(f_prime, p, q, coarse)
        failed += bad_full + bad_half
        rhs_rows.append(head + full)
        gaps.append(abs(full - half))
    _check_failure_rate(failed, dirs.shape[0] * (grid.radial * grid.angular + coarse.radial * coarse.angular), "stanton_check")

    lhs_rows_arr, rhs_rows_arr = np.array(lhs_rows), np.array(rhs_rows)
    lhs, rhs = mc_mean(lhs_rows_arr), mc_mean(rhs_rows_arr)
    diff = mc_mean(lhs_rows_arr - rhs_rows_arr)
    quad = float(np.mean(gaps)) if gaps else 0.0
    residual = Estimate(abs(float(diff.value)), float(np.hypot(diff.se, quad)))
    return IdentityCheck(
        lhs=lhs,
        rhs=rhs,
        residual=residual,
        grid={"radial": grid.radial, "angular": grid.angular, "directions": int(dirs.shape[0])},
    )


def littlewood_paley_check(f, grid: DiskGrid | None = None) -> IdentityCheck:
    """‖f‖² = |f(0)|² + 2∫|f′|² log(1/|w|) dA, 暴露圆盘网格自身的求积误差"""
    f = np.asarray(f, dtype=complex).reshape(-1)
    f_prime = P.polyder(f) if f.size > 1 else np.zeros(1, dtype=complex)
    grid = grid or DiskGrid(settings.disk_radial, settings.disk_angular)

    def term(g: DiskGrid) -> float:
        points, weights = g.nodes()
        return float(2.0 * np.sum(weights * np.abs(P.polyval(points, f_prime)) ** 2 * -np.log(np.abs(points))))

    lhs = float(np.sum(np.abs(f) ** 2))
    full = term(grid)
    rhs = float(abs(f[0]) ** 2) + full
    gap = abs(full - term(grid.coarse()))
    return IdentityCheck(
        lhs=Estimate(lhs, 0.0),
        rhs=Estimate(rhs, gap),
        residual=Estimate(abs(lhs - rhs), gap),
        grid={"radial": grid.radial, "angular": grid.angular, "directions": 1},
    )


# === B̂_N ===


@dataclass
class LimsupEstimate:
    """半径阶梯上的 sup 值, 外推取最大半径处的值, 误差带覆盖最后三个半径"""

    radii: list[float]
    sups: list[float]
    se: list[float]
    argmax: list[complex]
    estimate: float
    band: float
    normalization: str = "one_minus_r"

    def ladder(self) -> list[tuple[float, float, float]]:
        return list(zip(self.radii, self.sups, self.se))

    def to_dict(self) -> dict[str, Any]:
        return {
            "ladder": [[r, s] for r, s in zip(self.radii, self.sups)],
            "se": list(self.se),
            "argmax": [[w.real, w.imag] for w in self.argmax],
            "estimate": self.estimate,
            "band": self.band,
            "normalization": self.normalization,
            "approach": "sup over angular nodes on a radii ladder",
        }


def _normalizer(r: float, normalization: str) -> float:
    return -np.log(r) if normalization == "neg_log" else 1.0 - r


def bhat_N(
    phi: Symbol,
    radii=None,
    angular: int | None = None,
    plan: SphereSamplePlan | None = None,
    normalization: Literal["one_minus_r", "neg_log"] = "one_minus_r",
) -> LimsupEstimate:
    """每个半径上 sup_j ∫N(r e^{iθ_j}) dσ / (1 − r)"""
    radii = [float(r) for r in (radii or settings.radii)]
    angular = angular or settings.angular_nodes
    theta = 2.0 * np.pi * np.arange(angular) / angular
    ring = np.exp(1j * theta)
    sups, ses, where = [], [], []

    for r in radii:
        targets = r * ring
        if phi.is_constant:
            values, errors = np.zeros(angular), np.zeros(angular)
        elif phi.dim == 1:
            p, q = phi.rational_parts()
            found = disk_roots(np.tile(p, (angular, 1)), np.tile(q, (angular, 1)), targets)
            usable = found.ok | found.excluded
            _check_failure_rate(int(np.sum(~usable)), angular, "bhat_N")
            values = np.where(found.ok, found.counts, 0.0)
            errors = np.zeros(angular)
        else:
            estimates = [integrated_counting(phi, w, plan) for w in targets]
            values = np.array([float(e.value) for e in estimates])
            errors = np.array([e.se for e in estimates])
        scaled = values / _normalizer(r, normalization)
        best = int(np.argmax(scaled))
        sups.append(float(scaled[best]))
        ses.append(float(errors[best] / _normalizer(r, normalization)))
        where.append(complex(targets[best]))

    tail = sups[-3:]
    estimate = sups[-1]
    band = float(max(abs(s - estimate) for s in tail)) if tail else 0.0
    return LimsupEstimate(
        radii=radii,
        sups=sups,
        se=ses,
        argmax=where,
        estimate=estimate,
        band=band,
        normalization=normalization,
    )
