"""
错误与诊断模块 - 统一异常层级和运行期告警收集

每个异常携带:
    module     出错的模块 (kernels / symbols / clark ...)
    operation  出错的操作名
    exit_code  CLI 退出码 (1 I/O, 2 校验失败, 3 数值诊断失败)
    details    附加信息 (出问题的点、残差等)

校验结果 (Schwarz 检查、成员判定、一致性结论) 是返回值, 不走异常。

使用方式:
    from errors import DegenerateKernelError, warn, collect_diagnostics

    with collect_diagnostics() as notes:
        ...
        warn("Clark", "clustered roots near 1")
    print(notes)
"""

from __future__ import annotations

import sys
from contextlib import contextmanager
from typing import Any, Iterator


EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class ClarkLabError(Exception):
    """所有库错误的基类"""

    exit_code: int = EXIT_NUMERICAL

    def __init__(
        self,
        message: str,
        *,
        module: str = "",
        operation: str = "",
        details: dict[str, Any] | None = None,
    ):
        super().__init__(message)
        self.message = message
        self.module = module
        self.operation = operation
        self.details = details or {}

    def describe(self) -> str:
        """CLI 展示用: module.operation: message"""
        where = ".".join(part for part in (self.module, self.operation) if part)
        return f"{where}: {self.message}" if where else self.message

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": False,
            "error_code": self.exit_code,
            "description": self.describe(),
            "error_type": type(self).__name__,
            "details": {k: _plain(v) for k, v in self.details.items()},
        }


# === 数值 / 参数错误 (exit 3) ===


class DegenerateKernelError(ClarkLabError):
    """|1 − ⟨z, ζ⟩| 低于退化阈值"""


class PointDomainError(ClarkLabError):
    """点不在开球内或不在球面上"""


class ExceptionalPointError(ClarkLabError):
    """边界求值落在符号声明的例外集上"""


class ContactPointError(ClarkLabError):
    """φ(ζ) 与 α 接触, Clark 密度无定义"""


class RangeViolationError(ClarkLabError):
    """内部点处 |φ(z)| ≥ 1"""


class DivisionDegeneracyError(ClarkLabError):
    """有理符号分母近零"""


class ConstantSliceError(ClarkLabError):
    """切片为常数, 计数函数无定义"""


class ExcludedTargetError(ClarkLabError):
    """目标值 w 与 φ_ζ(0) 重合"""


class InsufficientResolutionError(ClarkLabError):
    """圆周节点数不足以分辨所需频带"""


class UnsupportedSymbolError(ClarkLabError):
    """该符号变体不支持所请求的操作"""


class NumericalDiagnosticError(ClarkLabError):
    """数值诊断失败"""


class RootOffCircleError(NumericalDiagnosticError):
    """求得的 Clark 原子根偏离单位圆超过容差"""


class RootResidualError(NumericalDiagnosticError):
    """求根残差 |φ_ζ(z) − w| 超过容差"""


class SliceFailureRateError(NumericalDiagnosticError):
    """被跳过的切片比例超过上限"""


# === 校验错误 (exit 2) ===


class SymbolValidationError(ClarkLabError):
    """符号格式错误或不是球到圆盘的自映射"""

    exit_code = EXIT_VALIDATION


class InvalidArgumentError(ClarkLabError):
    """参数越界 (α 不是单位模、网格超上限等)"""

    exit_code = EXIT_VALIDATION


# === I/O 错误 (exit 1) ===


class ReportIOError(ClarkLabError):
    """报告或符号文件读写失败"""

    exit_code = EXIT_IO


# === 诊断收集 ===

_collectors: list[list[dict[str, str]]] = []


def warn(tag: str, message: str) -> None:
    """打印一条带标签的告警, 并记入当前所有收集器"""
    from config import settings

    if not settings.quiet:
        print(f"[{tag}] {message}", file=sys.stderr)
    for notes in _collectors:
        notes.append({"source": tag, "message": message})


@contextmanager
def collect_diagnostics() -> Iterator[list[dict[str, str]]]:
    """收集 with 块内发出的告警, 写入报告的 diagnostics 字段"""
    notes: list[dict[str, str]] = []
    _collectors.append(notes)
    try:
        yield notes
    finally:
        _collectors.remove(notes)


def _plain(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if hasattr(value, "tolist"):
        return _plain(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value
