"""
符号模块 - 全纯自映射 φ: B_d → D 的表示、求值、切片、求导与校验

支持的变体:
    constant        常数 c
    polynomial      d 元多项式, 系数按多重指标存储
    rational        p/q, q 在闭球上无零点
    blaschke        d=1 有限 Blaschke 积 γ Π ((z − a)/(1 − ā z))^m
    singular-inner  d=1 原子奇异内函数 exp(−Σ c (ξ + z)/(ξ − z))
    product         d=1 上述变体的乘积, 前置因子 |γ| ≤ 1

符号构造后不可变, 求值是纯函数, 可在工作线程间共享。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, ClassVar, Iterable

import numpy as np
from numpy.polynomial import polynomial as P

from config import settings
from errors import (
    DivisionDegeneracyError,
    ExceptionalPointError,
    InvalidArgumentError,
    RangeViolationError,
    SymbolValidationError,
    UnsupportedSymbolError,
)
from kernels import INTERIOR_MARGIN, SPHERE_TOL, _points, circle_nodes, sample_directions

EXCEPTIONAL_TOL = 1e-12
DIVISION_TOL = 1e-14
POLE_TOL = 1e-12
SCHWARZ_TOL = 1e-9

MultiIndex = tuple[int, ...]


# === 多元多项式算术 ===


def _poly_mul(a: dict[MultiIndex, complex], b: dict[MultiIndex, complex]) -> dict[MultiIndex, complex]:
    out: dict[MultiIndex, complex] = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            key = tuple(x + y for x, y in zip(ka, kb))
            out[key] = out.get(key, 0j) + va * vb
    return out


def _poly_pow(a: dict[MultiIndex, complex], power: int, dim: int) -> dict[MultiIndex, complex]:
    out: dict[MultiIndex, complex] = {(0,) * dim: 1 + 0j}
    for _ in range(power):
        out = _poly_mul(out, a)
    return out


def trim_coefficients(coeffs: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """去掉相对 tol 可忽略的高次系数 (升幂)"""
    coeffs = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    k = coeffs.size
    while k > 1 and abs(coeffs[k - 1]) <= tol * scale:
        k -= 1
    return coeffs[:k]


def closed_disk_roots(coeffs: np.ndarray) -> np.ndarray:
    """升幂系数多项式在闭单位圆盘 |z| ≤ 1 上的根"""
    q = trim_coefficients(coeffs, DIVISION_TOL)
    if q.size <= 1:
        return np.empty(0, dtype=complex)
    roots = P.polyroots(q)
    return roots[np.abs(roots) <= 1.0 + POLE_TOL]


# === 校验结果 ===


@dataclass
class SchwarzResult:
    """validate_schwarz 的结果 (值, 不是异常)"""

    passed: bool
    max_modulus: float
    witness: list[complex] | None = None
    checked: int = 0
    structural: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "max_modulus": self.max_modulus,
            "witness": None if self.witness is None else [[w.real, w.imag] for w in self.witness],
            "checked": self.checked,
            "structural": self.structural,
        }


# === 基类 ===


class Symbol:
    """全纯映射 φ: B_d → D"""

    variant: ClassVar[str] = ""
    dim: int = 1

    # --- 子类实现 ---

    def _evaluate(self, z: np.ndarray) -> np.ndarray:
        """原始求值: z 形状 (N, d), 返回 (N,)"""
        raise NotImplementedError

    def slice(self, zeta) -> "Symbol":
        """λ ↦ φ(λζ)"""
        raise NotImplementedError

    def to_document(self) -> dict[str, Any]:
        raise NotImplementedError

    def _derivative(self, z: np.ndarray) -> np.ndarray:
        raise UnsupportedSymbolError(
            f"derivative not available for {self.variant}", module="symbols", operation="derivative1d"
        )

    def rational_parts(self) -> tuple[np.ndarray, np.ndarray]:
        """d=1: 返回 (p, q) 升幂系数, φ = p/q"""
        raise UnsupportedSymbolError(
            f"{self.variant} symbols have no rational form", module="symbols", operation="rational_parts"
        )

    def exceptional_points(self) -> np.ndarray:
        return np.empty(0, dtype=complex)

    @property
    def is_inner(self) -> bool:
        return False

    @property
    def is_constant(self) -> bool:
        return False

    def scale(self, c: complex) -> "Symbol":
        raise NotImplementedError

    def as_blaschke(self) -> "BlaschkeSymbol | None":
        return None

    # --- 公共接口 ---

    def eval(self, z) -> complex | np.ndarray:
        """内部点求值, 检查 |φ(z)| < 1"""
        arr = _points(z, self.dim)
        pts = arr.reshape(-1, self.dim)
        radius = np.linalg.norm(pts, axis=1)
        if np.any(radius >= 1.0 - INTERIOR_MARGIN):
            raise InvalidArgumentError(
                "eval needs interior points",
                module="symbols",
                operation="eval",
                details={"norm": float(np.max(radius))},
            )
        values = self._evaluate(pts)
        modulus = np.abs(values)
        if np.any(modulus >= 1.0):
            bad = int(np.argmax(modulus))
            raise RangeViolationError(
                "|phi(z)| >= 1 at an interior point",
                module="symbols",
                operation="eval",
                details={"point": pts[bad], "modulus": float(modulus[bad])},
            )
        return _shape_like(values, arr)

    def boundary_eval(self, zeta) -> complex | np.ndarray:
        """径向边界值 φ(ζ), 例外集上报错"""
        arr = _points(zeta, self.dim)
        pts = arr.reshape(-1, self.dim)
        gap = np.abs(np.linalg.norm(pts, axis=1) - 1.0)
        if np.any(gap > SPHERE_TOL):
            raise InvalidArgumentError(
                "boundary_eval needs sphere points",
                module="symbols",
                operation="boundary_eval",
                details={"deviation": float(np.max(gap))},
            )
        self._check_exceptional(pts, "boundary_eval")
        return _shape_like(self._evaluate(pts), arr)

    def derivative1d(self, z) -> complex | np.ndarray:
        """φ′(z), |z| ≤ 1, 按变体的精确求导规则"""
        if self.dim != 1:
            raise InvalidArgumentError(
                "derivative1d needs a univariate symbol", module="symbols", operation="derivative1d"
            )
        arr = _points(z, 1)
        pts = arr.reshape(-1, 1)
        if np.any(np.abs(pts[:, 0]) > 1.0 + SPHERE_TOL):
            raise InvalidArgumentError("derivative1d needs |z| <= 1", module="symbols", operation="derivative1d")
        self._check_exceptional(pts, "derivative1d")
        return _shape_like(self._derivative(pts[:, 0]), arr)

    def value_at_origin(self) -> complex:
        return complex(self._evaluate(np.zeros((1, self.dim), dtype=complex))[0])

    def slice_parts(self, directions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """批量切片的有理形式: 返回 (P, Q), 形状 (m, k) 与 (m, l), 升幂"""
        dirs = np.asarray(directions, dtype=complex).reshape(-1, self.dim)
        parts = [self.slice(row).rational_parts() for row in dirs]
        width_p = max(p.size for p, _ in parts)
        width_q = max(q.size for _, q in parts)
        num = np.zeros((len(parts), width_p), dtype=complex)
        den = np.zeros((len(parts), width_q), dtype=complex)
        for i, (p, q) in enumerate(parts):
            num[i, : p.size] = p
            den[i, : q.size] = q
        return num, den

    def _check_exceptional(self, pts: np.ndarray, operation: str) -> None:
        bad = self.exceptional_points()
        if self.dim != 1 or bad.size == 0:
            return
        dist = np.abs(pts[:, 0][:, None] - bad[None, :])
        if np.any(dist < EXCEPTIONAL_TOL):
            i, j = np.unravel_index(int(np.argmin(dist)), dist.shape)
            raise ExceptionalPointError(
                "point lies on the declared exceptional set",
                module="symbols",
                operation=operation,
                details={"point": complex(pts[i, 0]), "exceptional": complex(bad[j])},
            )

    def describe(self) -> str:
        return f"{self.variant}(d={self.dim})"


def _shape_like(values: np.ndarray, arr: np.ndarray) -> complex | np.ndarray:
    if arr.ndim == 1:
        return complex(values[0])
    return values.reshape(arr.shape[:-1])


def _direction_scalar(zeta) -> complex:
    arr = np.asarray(zeta, dtype=complex).reshape(-1)
    if arr.size != 1:
        raise InvalidArgumentError("univariate slice needs a scalar direction", module="symbols", operation="slice")
    return complex(arr[0])


# === 常数 ===


@dataclass(frozen=True, eq=False)
class ConstantSymbol(Symbol):
    value: complex
    dim: int = 1
    variant: ClassVar[str] = "constant"

    def _evaluate(self, z: np.ndarray) -> np.ndarray:
        return np.full(z.shape[0], complex(self.value))

    def _derivative(self, z: np.ndarray) -> np.ndarray:
        return np.zeros(z.shape[0], dtype=complex)

    def slice(self, zeta) -> "ConstantSymbol":
        return ConstantSymbol(self.value, 1)

    def rational_parts(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([complex(self.value)]), np.array([1 + 0j])

    def slice_parts(self, directions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        m = np.asarray(directions).reshape(-1, self.dim).shape[0]
        return np.full((m, 1), complex(self.value)), np.ones((m, 1), dtype=complex)

    @property
    def is_constant(self) -> bool:
        return True

    def scale(self, c: complex) -> "ConstantSymbol":
        return ConstantSymbol(complex(c) * complex(self.value), self.dim)

    def to_document(self) -> dict[str, Any]:
        v = complex(self.value)
        return {"dim": self.dim, "variant": self.variant, "value": [v.real, v.imag]}


# === 多项式 ===


@dataclass(frozen=True, eq=False)
class PolynomialSymbol(Symbol):
    """Σ coeff(μ) z^μ"""

    coefficients: dict[MultiIndex, complex]
    dim: int = 1
    variant: ClassVar[str] = "polynomial"

    def __post_init__(self):
        clean: dict[MultiIndex, complex] = {}
        for key, value in self.coefficients.items():
            index = tuple(int(k) for k in (key if isinstance(key, Iterable) else (key,)))
            if len(index) != self.dim or any(k < 0 for k in index):
                raise SymbolValidationError(
                    f"multi-index {index} does not match dimension {self.dim}",
                    module="symbols",
                    operation="PolynomialSymbol",
                )
            clean[index] = clean.get(index, 0j) + complex(value)
        if not clean:
            clean[(0,) * self.dim] = 0j
        object.__setattr__(self, "coefficients", clean)
        if self.degree > settings.max_polynomial_degree:
            raise SymbolValidationError(
                f"polynomial degree {self.degree} exceeds cap {settings.max_polynomial_degree}",
                module="symbols",
                operation="PolynomialSymbol",
            )

    @property
    def degree(self) -> int:
        return max((sum(k) for k, v in self.coefficients.items() if v != 0), default=0)

    @property
    def _exponents(self) -> tuple[np.ndarray, np.ndarray]:
        keys = sorted(self.coefficients)
        return np.array(keys, dtype=int).reshape(-1, self.dim), np.array([self.coefficients[k] for k in keys])

    def univariate_coefficients(self) -> np.ndarray:
        """d=1 时的升幂系数"""
        coeffs = np.zeros(self.degree + 1, dtype=complex)
        for key, value in self.coefficients.items():
            if sum(key) <= self.degree:
                coeffs[sum(key)] += value
        return coeffs

    def _evaluate(self, z: np.ndarray) -> np.ndarray:
        if self.dim == 1:
            return P.polyval(z[:, 0], self.univariate_coefficients())
        exps, coeffs = self._exponents
        out = np.zeros(z.shape[0], dtype=complex)
        for row, c in zip(exps, coeffs):
            out += c * np.prod(z ** row[None, :], axis=1)
        return out

    def _derivative(self, z: np.ndarray) -> np.ndarray:
        return P.polyval(z, P.polyder(self.univariate_coefficients()))

    def slice_parts(self, directions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dirs = np.asarray(directions, dtype=complex).reshape(-1, self.dim)
        exps, coeffs = self._exponents
        num = np.zeros((dirs.shape[0], self.degree + 1), dtype=complex)
        for row, c in zip(exps, coeffs):
            weight = int(row.sum())
            if weight <= self.degree:
                num[:, weight] += c * np.prod(dirs ** row[None, :], axis=1)
        return num, np.ones((dirs.shape[0], 1), dtype=complex)

    def slice(self, zeta) -> "PolynomialSymbol":
        num, _ = self.slice_parts(np.asarray(zeta, dtype=complex).reshape(1, self.dim))
        return PolynomialSymbol({(j,): c for j, c in enumerate(num[0])}, 1)

    def rational_parts(self) -> tuple[np.ndarray, np.ndarray]:
        if self.dim != 1:
            return super().rational_parts()
        return self.univariate_coefficients(), np.array([1 + 0j])

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    @property
    def is_inner(self) -> bool:
        nonzero = [(k, v) for k, v in self.coefficients.items() if v != 0]
        return self.dim == 1 and len(nonzero) == 1 and abs(abs(nonzero[0][1]) - 1.0) <= 1e-15 and sum(nonzero[0][0]) > 0

    def as_blaschke(self) -> "BlaschkeSymbol | None":
        if not self.is_inner:
            return None
        (key, value), = [(k, v) for k, v in self.coefficients.items() if v != 0]
        return BlaschkeSymbol(zeros=((0j, int(key[0])),), gamma=complex(value))

    def scale(self, c: complex) -> "PolynomialSymbol":
        return PolynomialSymbol({k: complex(c) * v for k, v in self.coefficients.items()}, self.dim)

    def compose_unitary(self, unitary) -> "PolynomialSymbol":
        """(φ∘U)(z) = φ(Uz)"""
        return PolynomialSymbol(_compose_linear(self.coefficients, unitary, self.dim), self.dim)

    def to_document(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "variant": self.variant,
            "terms": [
                {"index": list(k), "coeff": [complex(v).real, complex(v).imag]}
                for k, v in sorted(self.coefficients.items())
            ],
        }


def _compose_linear(coefficients: dict[MultiIndex, complex], unitary, dim: int) -> dict[MultiIndex, complex]:
    mat = np.asarray(unitary, dtype=complex).reshape(dim, dim)
    rows = []
    for i in range(dim):
        rows.append({tuple(int(j == k) for j in range(dim)): complex(mat[i, k]) for k in range(dim) if mat[i, k] != 0})
    out: dict[MultiIndex, complex] = {}
    for key, value in coefficients.items():
        term: dict[MultiIndex, complex] = {(0,) * dim: complex(value)}
        for i, power in enumerate(key):
            if power:
                term = _poly_mul(term, _poly_pow(rows[i], power, dim))
        for k, v in term.items():
            out[k] = out.get(k, 0j) + v
    return out


# === 有理函数 ===


@dataclass(frozen=True, eq=False)
class RationalSymbol(Symbol):
    numerator: PolynomialSymbol
    denominator: PolynomialSymbol
    variant: ClassVar[str] = "rational"

    def __post_init__(self):
        if self.numerator.dim != self.denominator.dim:
            raise SymbolValidationError(
                "numerator and denominator dimensions differ", module="symbols", operation="RationalSymbol"
            )
        if abs(self.denominator.value_at_origin()) < DIVISION_TOL:
            raise SymbolValidationError("denominator vanishes at 0", module="symbols", operation="RationalSymbol")
        if self.dim == 1:
            poles = closed_disk_roots(self.denominator.univariate_coefficients())
            if poles.size:
                raise SymbolValidationError(
                    "denominator vanishes on the closed disk",
                    module="symbols",
                    operation="RationalSymbol",
                    details={"pole": complex(poles[0])},
                )

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.numerator.dim

    def _evaluate(self, z: np.ndarray) -> np.ndarray:
        q = self.denominator._evaluate(z)
        small = np.abs(q) < DIVISION_TOL
        if np.any(small):
            raise DivisionDegeneracyError(
                "denominator vanishes",
                module="symbols",
                operation="eval",
                details={"point": z[int(np.argmax(small))]},
            )
        return self.numerator._evaluate(z) / q

    def _derivative(self, z: np.ndarray) -> np.ndarray:
        p = P.polyval(z, self.numerator.univariate_coefficients())
        q = P.polyval(z, self.denominator.univariate_coefficients())
        dp = self.numerator._derivative(z)
        dq = self.denominator._derivative(z)
        return (dp * q - p * dq) / q**2

    def slice(self, zeta) -> "RationalSymbol":
        return RationalSymbol(self.numerator.slice(zeta), self.denominator.slice(zeta))

    def slice_parts(self, directions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        num, _ = self.numerator.slice_parts(directions)
        den, _ = self.denominator.slice_parts(directions)
        return num, den

    def rational_parts(self) -> tuple[np.ndarray, np.ndarray]:
        return self.numerator.rational_parts()[0], self.denominator.rational_parts()[0]

    @property
    def is_constant(self) -> bool:
        return self.numerator.is_constant and self.denominator.is_constant

    def scale(self, c: complex) -> "RationalSymbol":
        return RationalSymbol(self.numerator.scale(c), self.denominator)

    def compose_unitary(self, unitary) -> "RationalSymbol":
        return RationalSymbol(self.numerator.compose_unitary(unitary), self.denominator.compose_unitary(unitary))

    def to_document(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "variant": self.variant,
            "numerator": self.numerator.to_document()["terms"],
            "denominator": self.denominator.to_document()["terms"],
        }


# === Blaschke 积 ===


@dataclass(frozen=True, eq=False)
class BlaschkeSymbol(Symbol):
    """γ Π ((z − a)/(1 − ā z))^m"""

    zeros: tuple[tuple[complex, int], ...]
    gamma: complex = 1 + 0j
    dim: int = 1
    variant: ClassVar[str] = "blaschke"

    def __post_init__(self):
        clean = tuple((complex(a), int(m)) for a, m in self.zeros)
        object.__setattr__(self, "zeros", clean)
        if not clean:
            raise SymbolValidationError("blaschke needs at least one zero", module="symbols", operation="BlaschkeSymbol")
        if abs(abs(complex(self.gamma)) - 1.0) > 1e-12:
            raise SymbolValidationError("blaschke gamma must be unimodular", module="symbols", operation="BlaschkeSymbol")
        for a, m in clean:
            if abs(a) >= 1.0 or m < 1:
                raise SymbolValidationError(
                    "blaschke zeros need |a| < 1 and multiplicity >= 1",
                    module="symbols",
                    operation="BlaschkeSymbol",
                    details={"zero": a, "multiplicity": m},
                )
        if self.degree > settings.max_polynomial_degree:
            raise SymbolValidationError(
                f"blaschke degree {self.degree} exceeds cap {settings.max_polynomial_degree}",
                module="symbols",
                operation="BlaschkeSymbol",
            )

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.zeros)

    def _factors(self, z: np.ndarray) -> list[tuple[np.ndarray, np.ndarray, int]]:
        out = []
        for a, m in self.zeros:
            den = 1.0 - np.conj(a) * z
            out.append(((z - a) / den, (1.0 - abs(a) ** 2) / den**2, m))
        return out

    def _evaluate(self, z: np.ndarray) -> np.ndarray:
        w = z[:, 0]
        out = np.full(w.shape, complex(self.gamma))
        for f, _, m in self._factors(w):
            out = out * f**m
        return out

    def _derivative(self, z: np.ndarray) -> np.ndarray:
        factors = self._factors(z)
        total = np.zeros(z.shape, dtype=complex)
        for k, (fk, dfk, mk) in enumerate(factors):
            term = mk * fk ** (mk - 1) * dfk
            for j, (fj, _, mj) in enumerate(factors):
                if j != k:
                    term = term * fj**mj
            total += term
        return complex(self.gamma) * total

    def slice(self, zeta) -> "BlaschkeSymbol":
        u = _direction_scalar(zeta)
        return BlaschkeSymbol(
            zeros=tuple((a * np.conj(u), m) for a, m in self.zeros),
            gamma=complex(self.gamma) * u**self.degree,
        )

    def rational_parts(self) -> tuple[np.ndarray, np.ndarray]:
        p = np.array([complex(self.gamma)])
        q = np.array([1 + 0j])
        for a, m in self.zeros:
            for _ in range(m):
                p = P.polymul(p, [-a, 1.0])
                q = P.polymul(q, [1.0, -np.conj(a)])
        return np.asarray(p, dtype=complex), np.asarray(q, dtype=complex)

    @property
    def is_inner(self) -> bool:
        return True

    def as_blaschke(self) -> "BlaschkeSymbol":
        return self

    def scale(self, c: complex) -> Symbol:
        if abs(abs(c) - 1.0) <= 1e-15:
            return BlaschkeSymbol(self.zeros, complex(self.gamma) * complex(c))
        return ProductSymbol((self,), gamma=complex(c))

    def to_document(self) -> dict[str, Any]:
        g = complex(self.gamma)
        return {
            "dim": 1,
            "variant": self.variant,
            "gamma": [g.real, g.imag],
            "zeros": [{"point": [a.real, a.imag], "multiplicity": m} for a, m in self.zeros],
        }


def random_blaschke(degree: int, seed: int = 0, recenter: bool = True, max_modulus: float = 0.9) -> BlaschkeSymbol:
    """按种子生成 Blaschke 积; recenter 时第一个零点放在 0 (于是 φ(0) = 0)"""
    rng = np.random.default_rng(seed)
    radius = max_modulus * np.sqrt(rng.uniform(size=degree))
    angle = rng.uniform(0.0, 2.0 * np.pi, size=degree)
    zeros = [complex(r * np.exp(1j * t)) for r, t in zip(radius, angle)]
    if recenter and zeros:
        zeros[0] = 0j
    gamma = complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
    return BlaschkeSymbol(zeros=tuple((a, 1) for a in zeros), gamma=gamma)


# === 原子奇异内函数 ===


@dataclass(frozen=True, eq=False)
class SingularInnerSymbol(Symbol):
    """exp(−Σ c (ξ + z)/(ξ − z))"""

    atoms: tuple[tuple[complex, float], ...]
    dim: int = 1
    variant: ClassVar[str] = "singular-inner"

    def __post_init__(self):
        clean = tuple((complex(xi), float(c)) for xi, c in self.atoms)
        object.__setattr__(self, "atoms", clean)
        for xi, c in clean:
            if abs(abs(xi) - 1.0) > 1e-12 or c <= 0:
                raise SymbolValidationError(
                    "singular-inner atoms need |xi| = 1 and mass > 0",
                    module="symbols",
                    operation="SingularInnerSymbol",
                    details={"atom": xi, "mass": c},
                )

    def _exponent(self, w: np.ndarray) -> np.ndarray:
        out = np.zeros(w.shape, dtype=complex)
        for xi, c in self.atoms:
            out += c * (xi + w) / (xi - w)
        return out

    def _evaluate(self, z: np.ndarray) -> np.ndarray:
        return np.exp(-self._exponent(z[:, 0]))

    def _derivative(self, z: np.ndarray) -> np.ndarray:
        inner_d = np.zeros(z.shape, dtype=complex)
        for xi, c in self.atoms:
            inner_d += c * 2.0 * xi / (xi - z) ** 2
        return -inner_d * np.exp(-self._exponent(z))

    def exceptional_points(self) -> np.ndarray:
        return np.array([xi for xi, _ in self.atoms], dtype=complex)

    def slice(self, zeta) -> "SingularInnerSymbol":
        u = _direction_scalar(zeta)
        return SingularInnerSymbol(tuple((xi * np.conj(u), c) for xi, c in self.atoms))

    @property
    def is_inner(self) -> bool:
        return True

    def scale(self, c: complex) -> "ProductSymbol":
        return ProductSymbol((self,), gamma=complex(c))

    def to_document(self) -> dict[str, Any]:
        return {
            "dim": 1,
            "variant": self.variant,
            "atoms": [{"point": [xi.real, xi.imag], "mass": c} for xi, c in self.atoms],
        }


# === 乘积 ===


@dataclass(frozen=True, eq=False)
class ProductSymbol(Symbol):
    """γ Π φ_k, d=1"""

    factors: tuple[Symbol, ...]
    gamma: complex = 1 + 0j
    dim: int = 1
    variant: ClassVar[str] = "product"

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise SymbolValidationError("product needs at least one factor", module="symbols", operation="ProductSymbol")
        if len(self.factors) > settings.max_product_factors:
            raise SymbolValidationError(
                f"product has more than {settings.max_product_factors} factors",
                module="symbols",
                operation="ProductSymbol",
            )
        if any(f.dim != 1 for f in self.factors):
            raise SymbolValidationError("product factors must be univariate", module="symbols", operation="ProductSymbol")
        if abs(complex(self.gamma)) > 1.0 + 1e-15:
            raise SymbolValidationError("product prefactor needs |gamma| <= 1", module="symbols", operation="ProductSymbol")

    def _evaluate(self, z: np.ndarray) -> np.ndarray:
        out = np.full(z.shape[0], complex(self.gamma))
        for f in self.factors:
            out = out * f._evaluate(z)
        return out

    def _derivative(self, z: np.ndarray) -> np.ndarray:
        pts = z.reshape(-1, 1)
        values = [f._evaluate(pts) for f in self.factors]
        total = np.zeros(z.shape, dtype=complex)
        for k, f in enumerate(self.factors):
            term = f._derivative(z)
            for j, v in enumerate(values):
                if j != k:
                    term = term * v
            total += term
        return complex(self.gamma) * total

    def exceptional_points(self) -> np.ndarray:
        parts = [f.exceptional_points() for f in self.factors]
        return np.concatenate(parts) if parts else np.empty(0, dtype=complex)

    def slice(self, zeta) -> "ProductSymbol":
        return ProductSymbol(tuple(f.slice(zeta) for f in self.factors), self.gamma)

    def rational_parts(self) -> tuple[np.ndarray, np.ndarray]:
        p = np.array([complex(self.gamma)])
        q = np.array([1 + 0j])
        for f in self.factors:
            fp, fq = f.rational_parts()
            p = P.polymul(p, fp)
            q = P.polymul(q, fq)
        return np.asarray(p, dtype=complex), np.asarray(q, dtype=complex)

    @property
    def is_inner(self) -> bool:
        return abs(abs(complex(self.gamma)) - 1.0) <= 1e-15 and all(f.is_inner for f in self.factors)

    @property
    def is_constant(self) -> bool:
        return all(f.is_constant for f in self.factors)

    def as_blaschke(self) -> "BlaschkeSymbol | None":
        if abs(abs(complex(self.gamma)) - 1.0) > 1e-15:
            return None
        zeros: list[tuple[complex, int]] = []
        gamma = complex(self.gamma)
        for f in self.factors:
            b = f.as_blaschke()
            if b is None:
                return None
            zeros.extend(b.zeros)
            gamma *= complex(b.gamma)
        return BlaschkeSymbol(tuple(zeros), gamma)

    def scale(self, c: complex) -> "ProductSymbol":
        return ProductSymbol(self.factors, complex(self.gamma) * complex(c))

    def to_document(self) -> dict[str, Any]:
        g = complex(self.gamma)
        return {
            "dim": 1,
            "variant": self.variant,
            "gamma": [g.real, g.imag],
            "factors": [f.to_document() for f in self.factors],
        }


# === 模块级操作 ===


def boundary_eval(phi: Symbol, zeta) -> complex | np.ndarray:
    return phi.boundary_eval(zeta)


def derivative1d(phi: Symbol, z) -> complex | np.ndarray:
    return phi.derivative1d(z)


def validate_schwarz(phi: Symbol, m: int = 10_000, seed: int = 0) -> SchwarzResult:
    """在 m 个边界点上检查 |φ| ≤ 1 + 1e−9, 失败时给出见证点

    Blaschke 与奇异内函数结构上通过; 多项式/有理函数在采样最大值附近再做局部极大化。
    """
    if isinstance(phi, (BlaschkeSymbol, SingularInnerSymbol)):
        return SchwarzResult(passed=True, max_modulus=1.0, checked=0, structural=True)
    if isinstance(phi, ProductSymbol):
        results = [validate_schwarz(f, m, seed) for f in phi.factors]
        failed = next((r for r in results if not r.passed), None)
        if failed is not None:
            return failed
        bound = abs(complex(phi.gamma)) * float(np.prod([r.max_modulus for r in results]))
        return SchwarzResult(
            passed=bound <= 1.0 + SCHWARZ_TOL,
            max_modulus=bound,
            checked=sum(r.checked for r in results),
            structural=all(r.structural for r in results),
        )
    if isinstance(phi, ConstantSymbol):
        modulus = abs(complex(phi.value))
        return SchwarzResult(
            passed=modulus < 1.0,
            max_modulus=modulus,
            witness=None if modulus < 1.0 else [0j] * phi.dim,
            structural=True,
        )

    if phi.dim == 1:
        points = circle_nodes(m).nodes.reshape(-1, 1)
    else:
        points = sample_directions(phi.dim, m, seed)
        if isinstance(phi, RationalSymbol):
            pole = _slice_pole(phi, points)
            if pole is not None:
                return SchwarzResult(
                    passed=False, max_modulus=float("inf"), witness=[complex(v) for v in pole], checked=m
                )
    try:
        values = np.abs(phi._evaluate(points))
    except DivisionDegeneracyError as exc:
        witness = exc.details.get("point")
        return SchwarzResult(
            passed=False,
            max_modulus=float("inf"),
            witness=None if witness is None else [complex(v) for v in np.ravel(witness)],
            checked=m,
        )
    best = int(np.argmax(values))
    witness, modulus = refine_boundary_maximum(phi, points[best], float(values[best]), m)
    return SchwarzResult(
        passed=modulus <= 1.0 + SCHWARZ_TOL,
        max_modulus=modulus,
        witness=None if modulus <= 1.0 + SCHWARZ_TOL else [complex(v) for v in witness],
        checked=m,
    )


def _slice_pole(phi: "RationalSymbol", directions: np.ndarray) -> np.ndarray | None:
    """切片 λ ↦ q(λζ) 在 |λ| ≤ 1 上的零点, 返回球内的极点 λζ"""
    _, den = phi.slice_parts(directions)
    for zeta, row in zip(directions, den):
        roots = closed_disk_roots(row)
        if roots.size:
            return roots[0] * zeta
    return None


def refine_boundary_maximum(phi: Symbol, start: np.ndarray, start_value: float, m: int) -> tuple[np.ndarray, float]:
    from scipy.optimize import minimize, minimize_scalar

    def modulus_at(point: np.ndarray) -> float:
        try:
            return float(np.abs(phi._evaluate(point.reshape(1, -1))[0]))
        except DivisionDegeneracyError:
            return float("inf")

    if phi.dim == 1:
        theta0 = float(np.angle(start[0]))
        step = 2.0 * np.pi / max(m, 1)
        res = minimize_scalar(
            lambda t: -modulus_at(np.array([np.exp(1j * t)])),
            bounds=(theta0 - step, theta0 + step),
            method="bounded",
        )
        candidate = np.array([np.exp(1j * res.x)])
    else:
        x0 = np.concatenate([start.real, start.imag])

        def objective(x: np.ndarray) -> float:
            vec = x[: phi.dim] + 1j * x[phi.dim :]
            return -modulus_at(vec / np.linalg.norm(vec))

        res = minimize(objective, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12})
        vec = res.x[: phi.dim] + 1j * res.x[phi.dim :]
        candidate = vec / np.linalg.norm(vec)
    value = modulus_at(candidate)
    if value > start_value:
        return candidate, value
    return np.asarray(start), start_value
