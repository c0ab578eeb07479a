"""
运行模块 - RunConfig 校验、子命令分发、退出码与报告写出

退出码:
    0  成功
    1  I/O 错误 (符号文件不存在、报告写不出)
    2  校验失败 (符号不是自映射、配置非法)
    3  数值诊断失败 (根残差超限、切片失败率过高 ...)

失败时向 stderr 打印错误信封:
    {"ok": false, "error_code": 3, "description": "counting.slice_counting: ...", ...}
"""

from __future__ import annotations

import sys
import time
from typing import Any

from pydantic import ValidationError

import registry
from clark import default_plan
from command_loader import CommandLoader
from config import settings
from errors import (
    EXIT_IO,
    EXIT_OK,
    EXIT_VALIDATION,
    ClarkLabError,
    InvalidArgumentError,
    NumericalDiagnosticError,
    SymbolValidationError,
    collect_diagnostics,
)
from kernels import SphereSamplePlan
from reports import build_report, error_envelope, print_error, write_report
from schemas import RunConfig, load_symbol
from symbols import Symbol, validate_schwarz


def ensure_commands() -> CommandLoader | None:
    """注册表为空时加载 commands/"""
    if registry.get_registered_commands():
        return None
    loader = CommandLoader()
    loader.load_all()
    return loader


def require_symbol(config: RunConfig) -> Symbol:
    """加载 --symbol 并做 Schwarz 检查, 不通过时 exit 2 (--symbol 是否给出由 run 统一检查)"""
    phi = load_symbol(config.symbol)
    check = validate_schwarz(phi, seed=config.seed)
    if not check.passed:
        raise SymbolValidationError(
            f"symbol is not a self-map of the disk (max |phi| = {check.max_modulus:.12g})",
            module="symbols",
            operation="validate_schwarz",
            details=check.to_dict(),
        )
    return phi


def plan_for(config: RunConfig, dim: int) -> SphereSamplePlan | None:
    """d ≥ 2 的球面方案; d=1 返回 None (走自适应求积)"""
    if dim == 1:
        return None
    if config.mode == "slice-product":
        return SphereSamplePlan.slice_product(dim, config.directions, config.circle_nodes, config.seed)
    return default_plan(dim, config.samples, config.seed)


def _validation_exit(exc: ValidationError) -> int:
    for error in exc.errors():
        if error.get("loc") and error["loc"][0] == "symbol":
            return EXIT_IO
    return EXIT_VALIDATION


def _config_error(exc: ValidationError) -> dict[str, Any]:
    first = exc.errors()[0]
    where = ".".join(str(p) for p in first.get("loc", ()))
    code = _validation_exit(exc)
    return {
        "ok": False,
        "error_code": code,
        "description": f"runner.config: {where}: {first.get('msg', '')}",
        "error_type": "ValidationError",
        "details": {},
    }


def run(config: RunConfig | dict[str, Any]) -> int:
    """执行一次子命令, 返回退出码"""
    started = time.time()
    if not isinstance(config, RunConfig):
        try:
            config = RunConfig(**config)
        except ValidationError as exc:
            envelope = _config_error(exc)
            print_error(envelope)
            return envelope["error_code"]

    ensure_commands()
    info = registry.get_registered_commands().get(config.command.lower())
    try:
        if info is None:
            raise InvalidArgumentError(
                f"unknown command {config.command!r}", module="runner", operation="run"
            )
        if info.needs_symbol and config.symbol is None:
            raise InvalidArgumentError(f"{info.name} needs --symbol", module="runner", operation=info.name)
        with collect_diagnostics() as notes:
            outcome = info.handler(config)
        if not isinstance(outcome, registry.CommandResult):
            outcome = registry.CommandResult(data=outcome)
        report = build_report(config, outcome.data, notes)
        write_report(report, config, outcome.tables, started)
    except ClarkLabError as exc:
        print_error(error_envelope(exc))
        return exc.exit_code
    except Exception as exc:
        wrapped = NumericalDiagnosticError(
            f"{type(exc).__name__}: {exc}",
            module="runner",
            operation=config.command,
            details={"error_type": type(exc).__name__},
        )
        print_error(error_envelope(wrapped))
        return wrapped.exit_code
    if outcome.exit_code != EXIT_OK and not settings.quiet:
        print(f"[Runner] {config.command} finished with exit code {outcome.exit_code}", file=sys.stderr)
    return outcome.exit_code
