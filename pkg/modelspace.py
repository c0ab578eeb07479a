"""
模型空间模块 - d=1 内函数 I 的 K_I: 再生核、Clark 酉算子 U_α 及其伴随、K_I* 成员判定

    K(z, w)         = (1 − I(z)·conj I(w)) / (1 − z·w̄)
    (U_α K_w)(ζ)    = (1 − α·conj I(w)) / (1 − ζ·w̄)          ζ 取 σ_α 的原子
    (U_α* f)(z)     = (1 − ᾱ I(z)) · Σ_j wt_j f(ζ_j) / (1 − z·conj ζ_j)
    f ∈ K_I*        ⇔  I·conj f 的指标 ≤ 0 的 Fourier 系数全为 0

元素只以核展开 (KernelSpan) 或多项式表示。
σ_α 的原子由 clark.clark_atoms_d1 给出, 所以 U_α 只对有限 Blaschke 积可用。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from clark import clark_atoms_d1
from errors import InsufficientResolutionError, InvalidArgumentError, UnsupportedSymbolError
from kernels import circle_nodes
from symbols import Symbol, trim_coefficients

SEPARATION_TOL = 1e-8
GRAM_EIG_TOL = -1e-10
MEMBER_TOL = 1e-10
MIN_MEMBER_NODES = 16


def _require_d1(symbol: Symbol, operation: str, inner: bool = True) -> None:
    if symbol.dim != 1:
        raise UnsupportedSymbolError("model spaces need d=1", module="modelspace", operation=operation)
    if inner and not symbol.is_inner:
        raise UnsupportedSymbolError(
            f"{symbol.variant} symbol is not inner", module="modelspace", operation=operation
        )


def _interior(x, operation: str) -> np.ndarray:
    arr = np.asarray(x, dtype=complex)
    if np.any(np.abs(arr) >= 1.0):
        raise InvalidArgumentError("points must lie in the open disk", module="modelspace", operation=operation)
    return arr


def _values(symbol: Symbol, z: np.ndarray) -> np.ndarray:
    return np.asarray(symbol.eval(z.reshape(-1, 1))).reshape(z.shape)


# === 再生核 ===


def repkernel(I: Symbol, z, w) -> complex | np.ndarray:
    """K(z, w) = (1 − I(z)·conj I(w))/(1 − z·w̄), z 与 w 按 numpy 规则广播"""
    _require_d1(I, "repkernel", inner=False)
    z = _interior(z, "repkernel")
    w = _interior(w, "repkernel")
    out = (1.0 - _values(I, z) * np.conj(_values(I, w))) / (1.0 - z * np.conj(w))
    return complex(out) if np.ndim(out) == 0 else out


@dataclass
class KernelSpan:
    """Σ c_j K_{w_j}; 基点两两分离, 核 Gram 矩阵半正定"""

    symbol: Symbol
    points: np.ndarray
    coefficients: np.ndarray | None = None

    def __post_init__(self):
        _require_d1(self.symbol, "KernelSpan")
        self.points = _interior(np.ravel(self.points), "KernelSpan")
        if self.coefficients is None:
            self.coefficients = np.ones(self.points.size, dtype=complex)
        self.coefficients = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if self.coefficients.size != self.points.size:
            raise InvalidArgumentError(
                "one coefficient per basis point", module="modelspace", operation="KernelSpan"
            )
        if self.points.size > 1:
            gaps = np.abs(self.points[:, None] - self.points[None, :])
            np.fill_diagonal(gaps, np.inf)
            if np.min(gaps) < SEPARATION_TOL:
                raise InvalidArgumentError(
                    "basis points closer than 1e-8",
                    module="modelspace",
                    operation="KernelSpan",
                    details={"separation": float(np.min(gaps))},
                )
        smallest = float(np.min(np.linalg.eigvalsh(self.gram())))
        if smallest < GRAM_EIG_TOL:
            raise InvalidArgumentError(
                "kernel Gram matrix is not positive semidefinite",
                module="modelspace",
                operation="KernelSpan",
                details={"min_eigenvalue": smallest},
            )

    def gram(self) -> np.ndarray:
        """G[i, j] = K(w_i, w_j) = ⟨K_{w_j}, K_{w_i}⟩"""
        return repkernel(self.symbol, self.points[:, None], self.points[None, :])

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return repkernel(self.symbol, z[..., None], self.points) @ self.coefficients

    def boundary(self, zeta) -> np.ndarray:
        """圆周上的值: |I| = 1 时公式同样成立"""
        zeta = np.asarray(zeta, dtype=complex)
        i_zeta = np.asarray(self.symbol.boundary_eval(zeta.reshape(-1, 1))).reshape(zeta.shape)
        i_w = _values(self.symbol, self.points)
        rows = (1.0 - i_zeta[..., None] * np.conj(i_w)) / (1.0 - zeta[..., None] * np.conj(self.points))
        return rows @ self.coefficients


# === Clark 酉算子 ===


@dataclass(frozen=True)
class KernelImage:
    """U_α K_w: ζ ↦ (1 − α·conj I(w))/(1 − ζ·w̄)"""

    symbol: Symbol
    alpha: complex
    w: complex

    @property
    def scale(self) -> complex:
        return 1.0 - self.alpha * np.conj(complex(self.symbol.eval(self.w)))

    def __call__(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex)
        return self.scale / (1.0 - zeta * np.conj(self.w))


def unitary_apply(I: Symbol, alpha, w) -> KernelImage:
    _require_d1(I, "unitary_apply")
    w = complex(_interior(w, "unitary_apply"))
    return KernelImage(symbol=I, alpha=complex(alpha), w=w)


def clark_atoms_for(I: Symbol, alpha, operation: str) -> tuple[np.ndarray, np.ndarray]:
    """σ_α 的原子; 奇异内因子没有有限原子表示"""
    _require_d1(I, operation)
    if I.as_blaschke() is None:
        raise UnsupportedSymbolError(
            "no finite atomic representation of the Clark measure for a singular inner factor",
            module="modelspace",
            operation=operation,
        )
    points, weights = clark_atoms_d1(I, alpha)
    return points.reshape(-1), weights


@dataclass
class GramResult:
    degree: int
    alpha: complex
    residual: float
    unitary: np.ndarray
    kernel: np.ndarray

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "alpha": [self.alpha.real, self.alpha.imag],
            "frobenius_residual": self.residual,
            "basis_size": int(self.kernel.shape[0]),
        }


def gram_test(I: Symbol, alpha, points) -> GramResult:
    """‖G_unitary − G_kernel‖_F, G_unitary[i, j] = Σ wt·(U_αK_{w_j})·conj(U_αK_{w_i})"""
    alpha = complex(alpha)
    span = KernelSpan(I, points)
    atoms, weights = clark_atoms_for(I, alpha, "gram_test")
    scales = 1.0 - alpha * np.conj(_values(I, span.points))
    images = scales[None, :] / (1.0 - atoms[:, None] * np.conj(span.points)[None, :])
    unitary = images.conj().T @ (weights[:, None] * images)
    kernel = span.gram()
    return GramResult(
        degree=I.as_blaschke().degree,
        alpha=alpha,
        residual=float(np.linalg.norm(unitary - kernel, "fro")),
        unitary=unitary,
        kernel=kernel,
    )


def atom_norm(I: Symbol, alpha, w) -> float:
    """Σ wt_j |(U_α K_w)(ζ_j)|², 应等于 K(w, w)"""
    atoms, weights = clark_atoms_for(I, alpha, "atom_norm")
    values = unitary_apply(I, alpha, w)(atoms)
    return float(np.sum(weights * np.abs(values) ** 2))


@dataclass(frozen=True)
class AdjointImage:
    """U_α* f: z ↦ (1 − ᾱ I(z))·Σ wt_j f(ζ_j)/(1 − z·conj ζ_j)"""

    symbol: Symbol
    alpha: complex
    atoms: np.ndarray
    weighted: np.ndarray

    def __call__(self, z) -> complex | np.ndarray:
        z = _interior(z, "adjoint_apply")
        cauchy = (1.0 / (1.0 - z[..., None] * np.conj(self.atoms))) @ self.weighted
        out = (1.0 - np.conj(self.alpha) * _values(self.symbol, z)) * cauchy
        return complex(out) if np.ndim(out) == 0 else out


def adjoint_apply(I: Symbol, alpha, f: Callable[[np.ndarray], np.ndarray] | np.ndarray) -> AdjointImage:
    """f 为原子上的函数 (可调用对象或按原子顺序排列的值)"""
    alpha = complex(alpha)
    atoms, weights = clark_atoms_for(I, alpha, "adjoint_apply")
    values = np.asarray(f(atoms) if callable(f) else f, dtype=complex).reshape(-1)
    if values.size != atoms.size:
        raise InvalidArgumentError(
            "f must give one value per atom",
            module="modelspace",
            operation="adjoint_apply",
            details={"atoms": atoms.size, "values": values.size},
        )
    return AdjointImage(symbol=I, alpha=alpha, atoms=atoms, weighted=weights * values)


def roundtrip_residual(I: Symbol, alpha, w, test_points) -> float:
    """max |U_α* U_α K_w − K_w| 在给定内点上"""
    image = unitary_apply(I, alpha, w)
    back = adjoint_apply(I, alpha, image)
    z = _interior(test_points, "roundtrip_residual")
    return float(np.max(np.abs(back(z) - repkernel(I, z, complex(w)))))


# === K_I* 成员判定 ===


@dataclass
class MembershipResult:
    member: bool
    coefficients: dict[int, complex]
    max_violation: float
    nodes: int
    tolerance: float = MEMBER_TOL

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": "member" if self.member else "not-member",
            "coefficients": {str(k): [v.real, v.imag] for k, v in sorted(self.coefficients.items())},
            "max_violation": self.max_violation,
            "nodes": self.nodes,
            "tolerance": self.tolerance,
        }


def _numerator_degree(I: Symbol) -> int | None:
    try:
        p, _ = I.rational_parts()
    except UnsupportedSymbolError:
        return None
    return trim_coefficients(np.asarray(p, dtype=complex)).size - 1


def ksmall_member(I: Symbol, f, nodes: int = 1024) -> MembershipResult:
    """I·conj f 在圆周节点上的 DFT, 指标 ≤ 0 的系数都 ≤ 1e−10 时判为成员

    f: 升幂多项式系数, 圆周上的可调用对象, 或 KernelSpan。
    多项式 f 只检查 [−deg f, 0], 其余情形检查 (−n/2, 0]。
    """
    _require_d1(I, "ksmall_member")
    n = int(nodes)
    if isinstance(f, KernelSpan):
        values_of = f.boundary
        band = None
    elif callable(f):
        values_of = f
        band = None
    else:
        coeffs = trim_coefficients(np.asarray(f, dtype=complex).reshape(-1))
        if coeffs.size == 0:
            coeffs = np.zeros(1, dtype=complex)
        deg_f = coeffs.size - 1
        deg_i = _numerator_degree(I)
        if deg_i is not None and n <= 2 * (deg_i + deg_f):
            raise InsufficientResolutionError(
                f"need more than {2 * (deg_i + deg_f)} circle nodes",
                module="modelspace",
                operation="ksmall_member",
                details={"nodes": n, "degree_I": deg_i, "degree_f": deg_f},
            )
        values_of = lambda zeta: np.polynomial.polynomial.polyval(zeta, coeffs)  # noqa: E731
        band = deg_f
    if n < MIN_MEMBER_NODES:
        raise InsufficientResolutionError(
            f"need at least {MIN_MEMBER_NODES} circle nodes", module="modelspace", operation="ksmall_member"
        )

    # 有例外点 (奇异内函数的原子) 时节点错开半格, 系数按相位还原
    offset = 0.5 if I.exceptional_points().size else 0.0
    zeta = circle_nodes(n, offset).nodes
    i_values = np.asarray(I.boundary_eval(zeta.reshape(-1, 1))).reshape(-1)
    g = i_values * np.conj(np.asarray(values_of(zeta), dtype=complex).reshape(-1))
    spectrum = np.fft.fft(g) / n
    lowest = -band if band is not None else -(n // 2) + 1
    coefficients = {
        k: complex(spectrum[k % n] * np.exp(-2j * np.pi * k * offset / n)) for k in range(lowest, 1)
    }
    violation = max(abs(v) for v in coefficients.values())
    return MembershipResult(
        member=violation <= MEMBER_TOL,
        coefficients=coefficients,
        max_violation=float(violation),
        nodes=n,
    )
