"""
clark-lab - Clark 测度数值实验的命令行入口

    python main.py clark --symbol half_plus_half_z --alpha 1 --out r.json
    python main.py essnorm --symbol z1_ball2
    python main.py verify --suite core

子命令来自 commands/<名字>/__init__.py, 通用参数在这里统一声明,
子命令专属参数由 @command(arguments=[...]) 提供并放进 RunConfig.options。
"""

from __future__ import annotations

import argparse
import sys
from typing import Any

import registry
from command_loader import CommandLoader
from config import settings
from runner import run
from schemas import RunConfig


def _radii(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad radii list {text!r}") from exc


def _common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--symbol", help="符号: 内联 JSON, 文件路径, 或语料条目名")
    parser.add_argument("--alpha", help="单位模复数: 1, i, 0.6+0.8i, angle:0.5, turn:0.1")
    parser.add_argument("--alpha-nodes", type=int, help=f"α 网格节点数 (默认 {settings.alpha_nodes})")
    parser.add_argument("--radii", type=_radii, help="半径阶梯, 逗号分隔")
    parser.add_argument("--angular-nodes", type=int, help="每个半径上的角向节点数")
    parser.add_argument("--circle-nodes", type=int, help="圆周节点数")
    parser.add_argument("--samples", type=int, help="Monte Carlo 样本数")
    parser.add_argument("--directions", type=int, help="切片方向数")
    parser.add_argument("--mode", choices=["monte-carlo", "slice-product"], help="球面方案")
    parser.add_argument("--seed", type=int, help="随机种子 (默认 0)")
    parser.add_argument("--out", help="报告输出路径 (默认 stdout)")
    parser.add_argument("--format", choices=["json", "csv"], help="报告格式")
    parser.add_argument("--threads", type=int, help="线程数 (覆盖 CLARKLAB_THREADS)")
    parser.add_argument("--quiet", action="store_true", help="不打印告警")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clark-lab",
        description="Aleksandrov–Clark 测度、计数函数与复合算子本质范数的数值实验",
        epilog=registry.get_help_text(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    seen = set()
    for info in registry.get_registered_commands().values():
        if info.name in seen:
            continue
        seen.add(info.name)
        sub = subparsers.add_parser(
            info.name,
            help=None if info.hidden else info.description,
            description=info.description,
            aliases=info.aliases,
        )
        _common_arguments(sub)
        extra = [sub.add_argument(*a.flags, **a.options).dest for a in info.arguments]
        sub.set_defaults(_command=info.name, _extra=extra)
    return parser


def config_from_args(ns: argparse.Namespace) -> dict[str, Any]:
    """argparse 结果 → RunConfig 字段 (未给出的参数走 settings 默认值)"""
    fields = RunConfig.model_fields
    config: dict[str, Any] = {"command": ns._command}
    for name in fields:
        if name in {"command", "options"}:
            continue
        value = getattr(ns, name, None)
        if value is not None:
            config[name] = value
    options = {}
    for dest in ns._extra:
        value = getattr(ns, dest)
        if dest in fields:
            if value is not None:
                config[dest] = value
        elif value is not None:
            options[dest] = value
    config["options"] = options
    return config


def main(argv: list[str] | None = None) -> int:
    loader = CommandLoader()
    loader.load_all()
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.threads:
        settings.threads = max(1, ns.threads)
    if ns.quiet:
        settings.quiet = True
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
