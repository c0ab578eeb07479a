"""
核心核函数模块 - 复向量几何、Cauchy/不变 Poisson 核、球面与圆周求积

约定:
    点以复数组表示, 最后一维是坐标 (形状 (..., d))。
    d=1 时允许直接传标量或一维数组, 由 d 参数区分。
    ⟨z, ζ⟩ = Σ z_i · conj(ζ_i), 对第二个参数共轭线性。

采样:
    球面点 = 归一化的 2d 维高斯向量, 随机源按 (seed, chunk_index) 建立,
    块大小固定 1024, 所以结果与工作线程数无关。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from errors import DegenerateKernelError, InvalidArgumentError, PointDomainError

INTERIOR_MARGIN = 1e-12
SPHERE_TOL = 1e-12
DEGENERATE_CUTOFF = 1e-14
CHUNK_SIZE = 1024

BoundaryFunction = Callable[[np.ndarray], np.ndarray]


# === 数据类 ===


@dataclass(frozen=True)
class Estimate:
    """带 1σ 标准误差的估计值"""

    value: complex | float
    se: float = 0.0

    @property
    def real(self) -> float:
        return float(np.real(self.value))

    def __sub__(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value - other.value, float(np.hypot(self.se, other.se)))

    def __add__(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value + other.value, float(np.hypot(self.se, other.se)))

    def to_dict(self) -> dict:
        value = self.value
        if isinstance(value, complex) or np.iscomplexobj(value):
            value = complex(value)
            if value.imag == 0.0:
                return {"value": value.real, "se": self.se}
            return {"value": [value.real, value.imag], "se": self.se}
        return {"value": float(value), "se": self.se}


@dataclass(frozen=True)
class SphereSamplePlan:
    """σ_d 的采样/求积方案

    monte-carlo:    sample_count 个独立均匀点
    slice-product:  directions 个随机方向 × circle_nodes 个圆周节点,
                    refine_to 给出时每个方向的圆周积分做自适应加密
    """

    dimension: int
    sample_count: int
    seed: int = 0
    mode: Literal["monte-carlo", "slice-product"] = "monte-carlo"
    directions: int | None = None
    circle_nodes: int | None = None
    refine_to: int | None = None

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidArgumentError("dimension must be positive", module="kernels", operation="SphereSamplePlan")
        if self.sample_count < 1:
            raise InvalidArgumentError("sample_count must be positive", module="kernels", operation="SphereSamplePlan")
        if self.mode == "slice-product":
            if not self.directions or not self.circle_nodes:
                raise InvalidArgumentError(
                    "slice-product plans need directions and circle_nodes",
                    module="kernels",
                    operation="SphereSamplePlan",
                )
            if self.directions * self.circle_nodes != self.sample_count:
                raise InvalidArgumentError(
                    "slice-product plans need directions * circle_nodes == sample_count",
                    module="kernels",
                    operation="SphereSamplePlan",
                    details={"directions": self.directions, "circle_nodes": self.circle_nodes},
                )
        elif self.mode != "monte-carlo":
            raise InvalidArgumentError(f"unknown plan mode {self.mode!r}", module="kernels", operation="SphereSamplePlan")

    @classmethod
    def monte_carlo(cls, dimension: int, sample_count: int, seed: int = 0) -> "SphereSamplePlan":
        return cls(dimension=dimension, sample_count=sample_count, seed=seed)

    @classmethod
    def slice_product(
        cls,
        dimension: int,
        directions: int,
        circle_nodes: int,
        seed: int = 0,
        refine_to: int | None = None,
    ) -> "SphereSamplePlan":
        return cls(
            dimension=dimension,
            sample_count=directions * circle_nodes,
            seed=seed,
            mode="slice-product",
            directions=directions,
            circle_nodes=circle_nodes,
            refine_to=refine_to,
        )

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "mode": self.mode,
            "directions": self.directions,
            "circle_nodes": self.circle_nodes,
            "refine_to": self.refine_to,
        }


@dataclass(frozen=True)
class CircleNodes:
    """σ_1 的等权梯形节点 e^{2πi(k+offset)/n}"""

    node_count: int
    nodes: np.ndarray
    offset: float = 0.0

    @property
    def weight(self) -> float:
        return 1.0 / self.node_count

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.node_count, 1.0 / self.node_count)


@dataclass(frozen=True)
class AdaptiveResult:
    """自适应圆周求积结果 (按行)"""

    means: np.ndarray
    errors: np.ndarray
    node_count: int
    capped: bool


# === 几何 ===


def _points(x, d: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=complex)
    if d == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., None]
    elif arr.ndim == 0:
        arr = arr.reshape(1)
    return arr


def inner(z, w, d: int | None = None) -> np.ndarray:
    """Hermitian 内积 ⟨z, w⟩, 对 w 共轭线性"""
    return np.sum(_points(z, d) * np.conj(_points(w, d)), axis=-1)


def norm(z, d: int | None = None) -> np.ndarray:
    return np.linalg.norm(_points(z, d), axis=-1)


def ball_point(z, d: int | None = None) -> np.ndarray:
    """构造 BallPoint: 要求 ‖z‖ < 1 − 1e−12"""
    arr = _points(z, d)
    radius = np.linalg.norm(arr, axis=-1)
    if np.any(radius >= 1.0 - INTERIOR_MARGIN):
        bad = int(np.argmax(radius))
        raise PointDomainError(
            "point is not strictly inside the ball",
            module="kernels",
            operation="ball_point",
            details={"norm": float(np.max(radius)), "index": bad},
        )
    return arr


def sphere_point(zeta, d: int | None = None) -> np.ndarray:
    """构造 SpherePoint: 要求 |‖ζ‖ − 1| ≤ 1e−12"""
    arr = _points(zeta, d)
    gap = np.abs(np.linalg.norm(arr, axis=-1) - 1.0)
    if np.any(gap > SPHERE_TOL):
        raise PointDomainError(
            "point is not on the unit sphere",
            module="kernels",
            operation="sphere_point",
            details={"deviation": float(np.max(gap))},
        )
    return arr


# === 核函数 ===


def _kernel_gap(z, zeta, d: int | None, operation: str) -> tuple[np.ndarray, int]:
    zp = _points(z, d)
    zq = _points(zeta, d)
    dim = d or zp.shape[-1]
    gap = 1.0 - np.sum(zp * np.conj(zq), axis=-1)
    small = np.abs(gap) < DEGENERATE_CUTOFF
    if np.any(small):
        raise DegenerateKernelError(
            "|1 - <z, zeta>| below 1e-14",
            module="kernels",
            operation=operation,
            details={"gap": float(np.min(np.abs(gap)))},
        )
    return gap, dim


def cauchy_kernel(z, zeta, d: int | None = None) -> np.ndarray | complex:
    """C(z, ζ) = (1 − ⟨z, ζ⟩)^{−d}"""
    gap, dim = _kernel_gap(z, zeta, d, "cauchy_kernel")
    out = gap ** (-dim)
    return complex(out) if np.ndim(out) == 0 else out


def poisson_kernel(z, zeta, d: int | None = None) -> np.ndarray | float:
    """P(z, ζ) = ((1 − ‖z‖²)/|1 − ⟨z, ζ⟩|²)^d"""
    gap, dim = _kernel_gap(z, zeta, d, "poisson_kernel")
    zp = _points(z, d)
    out = ((1.0 - np.sum(np.abs(zp) ** 2, axis=-1)) / np.abs(gap) ** 2) ** dim
    return float(out) if np.ndim(out) == 0 else out


# === 采样 ===


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, index])


def sample_directions(d: int, count: int, seed: int = 0, start_chunk: int = 0) -> np.ndarray:
    """按块生成 count 个 σ_d 均匀点, 形状 (count, d)"""
    chunks = []
    remaining = count
    index = start_chunk
    while remaining > 0:
        size = min(CHUNK_SIZE, remaining)
        gauss = _chunk_rng(seed, index).standard_normal((size, 2 * d))
        vec = gauss[:, :d] + 1j * gauss[:, d:]
        chunks.append(vec / np.linalg.norm(vec, axis=1, keepdims=True))
        remaining -= size
        index += 1
    if not chunks:
        return np.empty((0, d), dtype=complex)
    return np.concatenate(chunks, axis=0)


def sample_ball(d: int, count: int, seed: int = 0, max_radius: float = 0.9) -> np.ndarray:
    """半径不超过 max_radius 的球内均匀点, 形状 (count, d); 随机源与方向采样错开"""
    dirs = sample_directions(d, count, seed, start_chunk=1 << 20)
    u = _chunk_rng(seed, 1 << 21).uniform(size=count)
    return dirs * (max_radius * u ** (1.0 / (2 * d)))[:, None]


def sample_sphere(plan: SphereSamplePlan) -> np.ndarray:
    """按方案生成球面点; slice-product 方案返回 (m·n, d) 的方向 × 圆周节点"""
    if plan.mode == "monte-carlo":
        return sample_directions(plan.dimension, plan.sample_count, plan.seed)
    dirs = sample_directions(plan.dimension, plan.directions, plan.seed)
    nodes = circle_nodes(plan.circle_nodes).nodes
    return (nodes[None, :, None] * dirs[:, None, :]).reshape(-1, plan.dimension)


def pairwise_sum(values: np.ndarray) -> complex | float:
    """固定块大小的成对求和"""
    values = np.asarray(values).reshape(-1)
    if values.size == 0:
        return 0.0
    pad = (-values.size) % CHUNK_SIZE
    if pad:
        values = np.concatenate([values, np.zeros(pad, dtype=values.dtype)])
    sums = values.reshape(-1, CHUNK_SIZE).sum(axis=1)
    while sums.size > 1:
        if sums.size % 2:
            sums = np.concatenate([sums, np.zeros(1, dtype=sums.dtype)])
        sums = sums[0::2] + sums[1::2]
    return sums[0]


def mc_mean(values: np.ndarray) -> Estimate:
    """样本均值与标准误差; 复数值的 SE 取实部虚部方差之和"""
    values = np.asarray(values).reshape(-1)
    n = values.size
    mean = pairwise_sum(values) / n
    if n < 2:
        return Estimate(mean, 0.0)
    dev = values - mean
    var = float(np.real(pairwise_sum(np.abs(dev) ** 2))) / (n - 1)
    if not np.iscomplexobj(values):
        mean = float(mean)
    return Estimate(mean, float(np.sqrt(var / n)))


# === 圆周求积 ===


def circle_nodes(n: int, offset: float = 0.0) -> CircleNodes:
    """n 次单位根 (offset=0 时对 1, i, −1, −i 精确)"""
    if n < 1:
        raise InvalidArgumentError("circle_nodes needs n >= 1", module="kernels", operation="circle_nodes")
    k = np.arange(n, dtype=float) + offset
    nodes = np.exp(2j * np.pi * k / n)
    if offset == 0.0:
        exact = np.array([1.0, 1j, -1.0, -1j])
        quarter = (4 * np.arange(n)) % n == 0
        nodes[quarter] = exact[(4 * np.arange(n)[quarter] // n) % 4]
    return CircleNodes(node_count=n, nodes=nodes, offset=offset)


def adaptive_circle_mean(
    g: Callable[[np.ndarray], np.ndarray],
    start_nodes: int = 64,
    max_nodes: int = 2**20,
    rtol: float = 1e-13,
    offset: float = 0.0,
    atol: float = 0.0,
) -> AdaptiveResult:
    """梯形求积加倍加密, 直到离散谱高频四分之一低于 rtol·尺度

    g 把圆周点数组 (n,) 映射到 (n,) 或 (m, n); 多行一起加密。
    误差估计: 收敛时取高频尾部幅度, 触顶时取 |T_n − T_{n/2}|。
    """
    n = max(4, int(start_nodes))
    previous = None
    while True:
        nodes = circle_nodes(n, offset).nodes
        values = np.atleast_2d(np.asarray(g(nodes)))
        means = values.mean(axis=1)
        spectrum = np.abs(np.fft.fft(values, axis=1)) / n
        freqs = np.abs(np.fft.fftfreq(n, 1.0 / n))
        tail = spectrum[:, freqs >= n / 4].max(axis=1)
        scale = np.maximum(np.abs(means), np.abs(values).mean(axis=1))
        converged = np.all(tail <= rtol * scale + atol)
        if converged:
            return AdaptiveResult(means=means, errors=tail, node_count=n, capped=False)
        if 2 * n > max_nodes:
            errors = np.abs(means - previous) if previous is not None else tail
            return AdaptiveResult(means=means, errors=np.maximum(errors, tail), node_count=n, capped=True)
        previous = means
        n *= 2


def slice_integrate(
    f: BoundaryFunction,
    d: int,
    directions: int,
    nodes: int,
    seed: int = 0,
    offset: float = 0.0,
    refine_to: int | None = None,
    rtol: float = 1e-13,
) -> Estimate:
    """(1/m) Σ_j (1/n) Σ_k f(e^{2πik/n} ζ_j), ζ_j 随机方向; d=1 时就是圆周梯形

    f 接收形状 (N, d) 的点数组, 返回 (N,)。
    refine_to 给出时每个方向上的圆周均值自适应加密到至多 refine_to 个节点,
    求积误差与方向间的统计误差合并进 SE。
    """
    dirs = np.ones((1, 1), dtype=complex) if d == 1 else sample_directions(d, directions, seed)
    m = dirs.shape[0]

    def on_circle(lam: np.ndarray) -> np.ndarray:
        pts = lam[None, :, None] * dirs[:, None, :]
        return np.asarray(f(pts.reshape(-1, d))).reshape(m, lam.size)

    if refine_to:
        result = adaptive_circle_mean(on_circle, nodes, max(nodes, refine_to), rtol, offset)
        row_means, quad_err = result.means, float(np.max(result.errors))
    else:
        row_means = on_circle(circle_nodes(nodes, offset).nodes).mean(axis=1)
        quad_err = 0.0
    if m == 1:
        value = complex(row_means[0]) if np.iscomplexobj(row_means) else float(row_means[0])
        return Estimate(value, quad_err)
    est = mc_mean(row_means)
    return Estimate(est.value, float(np.hypot(est.se, quad_err)))


def sphere_integrate(f: BoundaryFunction, plan: SphereSamplePlan, offset: float = 0.0) -> Estimate:
    """按方案模式对 σ_d 积分"""
    if plan.mode == "monte-carlo":
        if plan.dimension == 1:
            return slice_integrate(f, 1, 1, plan.sample_count, offset=offset)
        return mc_mean(f(sample_sphere(plan)))
    return slice_integrate(
        f,
        plan.dimension,
        plan.directions,
        plan.circle_nodes,
        seed=plan.seed,
        offset=offset,
        refine_to=plan.refine_to,
    )


# === 圆盘网格 ===


@dataclass(frozen=True)
class DiskGrid:
    """以 center 为极点的张量网格: 径向 Gauss–Legendre (ρ = R(t)·u²), 角向梯形

    权重对应规范化面积测度 dA = dx dy / π。
    """

    radial: int = 64
    angular: int = 128
    center: complex = 0.0

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        from scipy.special import roots_legendre

        x, wx = roots_legendre(self.radial)
        u = 0.5 * (x + 1.0)
        wu = 0.5 * wx
        t = 2.0 * np.pi * (np.arange(self.angular) + 0.5) / self.angular
        direction = np.exp(1j * t)
        c = complex(self.center)
        # R(t): 从 center 沿 e^{it} 到单位圆的距离
        proj = np.real(np.conj(c) * direction)
        reach = -proj + np.sqrt(proj**2 + 1.0 - abs(c) ** 2)
        rho = reach[None, :] * u[:, None] ** 2
        points = c + rho * direction[None, :]
        weights = (2.0 * reach[None, :] ** 2 * u[:, None] ** 3 * wu[:, None]) * (2.0 / self.angular)
        return points.reshape(-1), weights.reshape(-1)

    def coarse(self) -> "DiskGrid":
        return DiskGrid(max(2, self.radial // 2), max(4, self.angular // 2), self.center)
