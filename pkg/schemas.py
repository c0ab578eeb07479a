"""
文档模型 - 符号、测度、运行配置的 JSON 结构 (pydantic)

符号文档:
    {"dim": d, "variant": "...", 变体字段}
    系数一律写成 [re, im], 多重指标写成整数数组。
    to_document → JSON → build_symbol 精确往返。

运行配置:
    RunConfig 由 argparse 结果与 settings 默认值合并而来, 校验失败映射为退出码 2。
"""

from __future__ import annotations

import cmath
import json
import math
from pathlib import Path
from typing import Annotated, Any, Literal, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError, field_validator, model_validator

from config import settings
from errors import InvalidArgumentError, ReportIOError, SymbolValidationError
from symbols import (
    BlaschkeSymbol,
    ConstantSymbol,
    PolynomialSymbol,
    ProductSymbol,
    RationalSymbol,
    SingularInnerSymbol,
    Symbol,
    random_blaschke,
)

Pair = tuple[float, float]


# === 符号文档 ===


class TermDoc(BaseModel):
    index: list[int]
    coeff: Pair


class ConstantDoc(BaseModel):
    variant: Literal["constant"]
    dim: int = Field(default=1, ge=1)
    value: Pair
    name: str | None = None


class PolynomialDoc(BaseModel):
    variant: Literal["polynomial"]
    dim: int = Field(default=1, ge=1)
    terms: list[TermDoc] = Field(min_length=1)
    name: str | None = None


class RationalDoc(BaseModel):
    variant: Literal["rational"]
    dim: int = Field(default=1, ge=1)
    numerator: list[TermDoc] = Field(min_length=1)
    denominator: list[TermDoc] = Field(min_length=1)
    name: str | None = None


class ZeroDoc(BaseModel):
    point: Pair
    multiplicity: int = Field(default=1, ge=1)


class BlaschkeDoc(BaseModel):
    variant: Literal["blaschke"]
    dim: Literal[1] = 1
    gamma: Pair = (1.0, 0.0)
    zeros: list[ZeroDoc] = Field(min_length=1)
    name: str | None = None


class AtomDoc(BaseModel):
    point: Pair
    mass: float = Field(gt=0)


class SingularInnerDoc(BaseModel):
    variant: Literal["singular-inner"]
    dim: Literal[1] = 1
    atoms: list[AtomDoc] = Field(min_length=1)
    name: str | None = None


class ProductDoc(BaseModel):
    variant: Literal["product"]
    dim: Literal[1] = 1
    gamma: Pair = (1.0, 0.0)
    factors: list["SymbolDoc"] = Field(min_length=1)
    name: str | None = None


SymbolDoc = Annotated[
    Union[ConstantDoc, PolynomialDoc, RationalDoc, BlaschkeDoc, SingularInnerDoc, ProductDoc],
    Field(discriminator="variant"),
]
ProductDoc.model_rebuild()
_symbol_adapter: TypeAdapter = TypeAdapter(SymbolDoc)


def _c(pair: Pair) -> complex:
    return complex(pair[0], pair[1])


def _terms(terms: list[TermDoc], dim: int) -> PolynomialSymbol:
    coeffs: dict[tuple[int, ...], complex] = {}
    for term in terms:
        key = tuple(term.index)
        coeffs[key] = coeffs.get(key, 0j) + _c(term.coeff)
    return PolynomialSymbol(coeffs, dim)


def _build(doc: Any) -> Symbol:
    if isinstance(doc, ConstantDoc):
        return ConstantSymbol(_c(doc.value), doc.dim)
    if isinstance(doc, PolynomialDoc):
        return _terms(doc.terms, doc.dim)
    if isinstance(doc, RationalDoc):
        return RationalSymbol(_terms(doc.numerator, doc.dim), _terms(doc.denominator, doc.dim))
    if isinstance(doc, BlaschkeDoc):
        return BlaschkeSymbol(tuple((_c(z.point), z.multiplicity) for z in doc.zeros), _c(doc.gamma))
    if isinstance(doc, SingularInnerDoc):
        return SingularInnerSymbol(tuple((_c(a.point), a.mass) for a in doc.atoms))
    if isinstance(doc, ProductDoc):
        return ProductSymbol(tuple(_build(f) for f in doc.factors), _c(doc.gamma))
    raise SymbolValidationError(f"unknown symbol document {type(doc).__name__}", module="schemas", operation="build_symbol")


def build_symbol(document: dict[str, Any]) -> Symbol:
    """符号文档 → Symbol"""
    try:
        doc = _symbol_adapter.validate_python(document)
    except ValidationError as exc:
        raise SymbolValidationError(
            f"malformed symbol document: {exc.errors()[0]['msg']}",
            module="schemas",
            operation="build_symbol",
        ) from exc
    return _build(doc)


def symbol_document(phi: Symbol) -> dict[str, Any]:
    """Symbol → 规范化的符号文档 (经过模型校验)"""
    doc = _symbol_adapter.validate_python(phi.to_document())
    return _symbol_adapter.dump_python(doc, mode="json", exclude_none=True)


# 按种子生成的语料条目 (不落盘, 用 corpus 命令可以写出)
GENERATED_CORPUS = {
    "random_blaschke6": lambda: random_blaschke(6, seed=7),
}


def resolve_symbol_path(ref: str) -> Path | None:
    """符号引用解析: 文件路径, 或 corpus/ 下的条目名; 内联 JSON 返回 None"""
    if ref.lstrip().startswith("{"):
        return None
    if ref in GENERATED_CORPUS:
        return None
    path = Path(ref)
    if path.exists():
        return path
    for candidate in (settings.corpus_dir / ref, settings.corpus_dir / f"{ref}.json"):
        if candidate.exists():
            return candidate
    raise ReportIOError(f"symbol file not found: {ref}", module="schemas", operation="load_symbol")


def load_symbol(ref: str) -> Symbol:
    """从内联 JSON / 文件 / 语料条目名加载符号"""
    if ref in GENERATED_CORPUS:
        return GENERATED_CORPUS[ref]()
    path = resolve_symbol_path(ref)
    try:
        text = ref if path is None else path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"cannot read symbol file {path}: {exc}", module="schemas", operation="load_symbol") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SymbolValidationError(f"symbol is not valid JSON: {exc}", module="schemas", operation="load_symbol") from exc
    return build_symbol(document)


def corpus_entries(corpus_dir: Path | None = None) -> dict[str, Symbol]:
    """内置语料: corpus/*.json 加上生成的条目, 按名字排序"""
    folder = Path(corpus_dir or settings.corpus_dir)
    entries: dict[str, Symbol] = {}
    for path in sorted(folder.glob("*.json")):
        entries[path.stem] = load_symbol(str(path))
    for name, make in GENERATED_CORPUS.items():
        entries.setdefault(name, make())
    return dict(sorted(entries.items()))


# === 测度文档 ===


class MeasureAtomDoc(BaseModel):
    point: list[Pair] = Field(min_length=1)
    weight: Pair


class DensityDoc(BaseModel):
    formula: Literal["uniform", "clark-ac"]
    symbol: dict[str, Any] | None = None
    alpha: Pair | None = None

    @model_validator(mode="after")
    def _clark_needs_symbol(self) -> "DensityDoc":
        if self.formula == "clark-ac" and (self.symbol is None or self.alpha is None):
            raise ValueError("clark-ac densities need symbol and alpha")
        return self


class MeasureDoc(BaseModel):
    dim: int = Field(ge=1)
    positive: bool = True
    atoms: list[MeasureAtomDoc] = Field(default_factory=list)
    density: DensityDoc | None = None


# === 运行配置 ===


def parse_alpha(text: str) -> complex:
    """解析单位模复数: "1", "-1", "i", "0.6+0.8i", "angle:0.5", "turn:0.1" """
    raw = text.strip().lower().replace(" ", "")
    if raw.startswith("angle:"):
        return cmath.exp(1j * float(raw[6:]))
    if raw.startswith("turn:"):
        return cmath.exp(2j * math.pi * float(raw[5:]))
    raw = raw.replace("i", "j")
    if raw in {"j", "+j"}:
        value = 1j
    elif raw == "-j":
        value = -1j
    else:
        value = complex(raw)
    if abs(abs(value) - 1.0) > 1e-12:
        raise InvalidArgumentError(f"alpha {text!r} is not unimodular", module="schemas", operation="parse_alpha")
    return value


def parse_complex(text: str) -> complex:
    """"0.5", "0.3i", "0.1-0.2i" → complex"""
    raw = text.strip().lower().replace(" ", "").replace("i", "j")
    if raw in {"j", "+j"}:
        return 1j
    if raw == "-j":
        return -1j
    try:
        return complex(raw)
    except ValueError as exc:
        raise InvalidArgumentError(f"bad complex number {text!r}", module="schemas", operation="parse_complex") from exc


def parse_coefficients(text: str) -> list[complex]:
    """逗号分隔的复数列表 (多项式升幂系数、基点、y 网格 ...)"""
    items = [item for item in text.split(",") if item.strip()]
    if not items:
        raise InvalidArgumentError("empty list", module="schemas", operation="parse_coefficients")
    return [parse_complex(item) for item in items]


class RunConfig(BaseModel):
    """一次 CLI 运行的完整配置"""

    command: str = Field(min_length=1)
    symbol: str | None = None
    alpha: str | None = None
    alpha_nodes: int = Field(default_factory=lambda: settings.alpha_nodes, ge=1)
    radii: list[float] = Field(default_factory=lambda: list(settings.radii), min_length=1)
    angular_nodes: int = Field(default_factory=lambda: settings.angular_nodes, ge=1)
    circle_nodes: int = Field(default_factory=lambda: settings.circle_nodes, ge=1)
    samples: int = Field(default_factory=lambda: settings.sphere_samples, ge=1)
    directions: int = Field(default_factory=lambda: settings.directions, ge=1)
    mode: Literal["monte-carlo", "slice-product"] = "monte-carlo"
    seed: int = Field(default_factory=lambda: settings.seed)
    out: str | None = None
    format: Literal["json", "csv"] = "json"
    suite: str = "core"
    options: dict[str, Any] = Field(default_factory=dict)

    @field_validator("alpha_nodes")
    @classmethod
    def _alpha_cap(cls, v: int) -> int:
        if v > settings.max_alpha_nodes:
            raise ValueError(f"alpha_nodes above cap {settings.max_alpha_nodes}")
        return v

    @field_validator("samples", "directions")
    @classmethod
    def _sample_cap(cls, v: int) -> int:
        if v > settings.max_samples:
            raise ValueError(f"sample count above cap {settings.max_samples}")
        return v

    @field_validator("circle_nodes")
    @classmethod
    def _circle_cap(cls, v: int) -> int:
        if v > settings.max_circle_nodes_d1:
            raise ValueError(f"circle_nodes above cap {settings.max_circle_nodes_d1}")
        return v

    @field_validator("radii")
    @classmethod
    def _radii_ladder(cls, v: list[float]) -> list[float]:
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("radii must be strictly increasing")
        if v[0] <= 0.0 or v[-1] > 1.0 - 1e-6:
            raise ValueError("radii must lie in (0, 1 - 1e-6]")
        return v

    @field_validator("alpha")
    @classmethod
    def _alpha_unimodular(cls, v: str | None) -> str | None:
        if v is not None:
            try:
                parse_alpha(v)
            except (InvalidArgumentError, ValueError) as exc:
                raise ValueError(str(exc)) from exc
        return v

    @field_validator("symbol")
    @classmethod
    def _symbol_exists(cls, v: str | None) -> str | None:
        if v is not None:
            try:
                resolve_symbol_path(v)
            except ReportIOError as exc:
                raise ValueError(exc.message) from exc
        return v

    def alpha_value(self) -> complex | None:
        return None if self.alpha is None else parse_alpha(self.alpha)

    def hashable_dict(self) -> dict[str, Any]:
        """参与 config_hash 的字段 (不含输出位置)"""
        return self.model_dump(mode="json", exclude={"out", "format"})
