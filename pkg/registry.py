"""
注册表模块 - CLI 子命令与验收检查的装饰器注册

命令开发者只需:
1. 在 commands/ 下建文件夹 commands/<名字>/__init__.py
2. 用 @command 注册子命令处理函数
3. 用 @check 注册 verify 套件里的检查

示例:
    from registry import arg, check, command, CheckResult, CommandResult
    from schemas import RunConfig

    @command("atoms", description="d=1 Clark 原子", arguments=[arg("--sort", choices=["arg", "weight"])])
    def atoms_cmd(config: RunConfig) -> CommandResult:
        return CommandResult({"atoms": []})

    @check("herglotz", description="Herglotz 恒等式")
    def herglotz_check(quick: bool) -> CheckResult:
        return CheckResult("herglotz", passed=True, value=0.0, tolerance=1e-10)
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Any, Callable


# === 数据类 ===


@dataclass
class Argument:
    """子命令专属参数, 原样转交 argparse.add_argument"""

    flags: tuple[str, ...]
    options: dict[str, Any] = field(default_factory=dict)


def arg(*flags: str, **options: Any) -> Argument:
    return Argument(flags=flags, options=options)


@dataclass
class CommandResult:
    """处理函数的返回: 报告主体、CSV 表格、非零退出码 (结论性失败时)"""

    data: dict[str, Any]
    tables: dict[str, list[dict[str, Any]]] = field(default_factory=dict)
    exit_code: int = 0


CommandHandler = Callable[..., "CommandResult | dict[str, Any]"]


@dataclass
class CommandInfo:
    """命令注册信息"""
    name: str
    handler: CommandHandler
    description: str = ""
    usage: str = ""
    arguments: list[Argument] = field(default_factory=list)
    aliases: list[str] = field(default_factory=list)
    hidden: bool = False
    needs_symbol: bool = True


@dataclass
class CheckResult:
    """一条验收检查的结论"""
    name: str
    passed: bool
    value: float | None = None
    tolerance: float | None = None
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


CheckHandler = Callable[[bool], "CheckResult | list[CheckResult]"]


@dataclass
class CheckInfo:
    """检查注册信息; quick 套件以缩小的样本量运行同一个处理函数"""
    name: str
    handler: CheckHandler
    description: str = ""
    suites: tuple[str, ...] = ("core", "quick")


# 全局注册表 - 命令包加载时自动填充
_commands: dict[str, CommandInfo] = {}
_checks: dict[str, CheckInfo] = {}


def command(
    name: str,
    description: str = "",
    usage: str = "",
    arguments: list[Argument] | None = None,
    aliases: list[str] | None = None,
    hidden: bool = False,
    needs_symbol: bool = True,
):
    """
    命令装饰器 - 注册一个子命令处理函数

    Args:
        name: 子命令名
        description: 命令描述 (用于 --help)
        usage: 使用说明
        arguments: 子命令专属参数
        aliases: 别名列表
        hidden: 是否在帮助中隐藏
        needs_symbol: 是否要求 --symbol

    Example:
        @command("clark", description="Clark 测度数据")
        def clark_cmd(config: RunConfig) -> CommandResult:
            ...
    """
    def decorator(func: CommandHandler) -> CommandHandler:
        info = CommandInfo(
            name=name.lower(),
            handler=func,
            description=description,
            usage=usage or f"clark-lab {name}",
            arguments=arguments or [],
            aliases=aliases or [],
            hidden=hidden,
            needs_symbol=needs_symbol,
        )
        _commands[name.lower()] = info
        for alias in info.aliases:
            _commands[alias.lower()] = info

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            return func(*args, **kwargs)
        return wrapper

    return decorator


def check(name: str, description: str = "", suites: tuple[str, ...] = ("core", "quick")):
    """
    检查装饰器 - 注册一条验收检查

    处理函数接收 quick 标志, 返回一个或多个 CheckResult。

    Example:
        @check("mass-budget", description="(1+z)/2 的奇异质量")
        def mass_budget(quick: bool) -> CheckResult:
            ...
    """
    def decorator(func: CheckHandler) -> CheckHandler:
        _checks[name] = CheckInfo(name=name, handler=func, description=description, suites=tuple(suites))
        return func

    return decorator


def get_registered_commands() -> dict[str, CommandInfo]:
    """获取所有已注册的命令 (直接返回，无复制)"""
    return _commands


def get_registered_checks(suite: str | None = None) -> list[CheckInfo]:
    """按注册顺序返回检查, suite 给出时只保留该套件的"""
    return [info for info in _checks.values() if suite is None or suite in info.suites]


def clear_registry():
    """清空注册表 (用于测试或重新加载)"""
    _commands.clear()
    _checks.clear()


def get_help_text() -> str:
    """生成帮助文本"""
    lines = ["可用命令:"]
    seen = set()
    for info in _commands.values():
        if info.hidden or info.name in seen:
            continue
        seen.add(info.name)
        desc = f" - {info.description}" if info.description else ""
        aliases = f" (别名: {', '.join(info.aliases)})" if info.aliases else ""
        lines.append(f"  {info.name}{desc}{aliases}")
    return "\n".join(lines)
