"""
命令加载器 - 自动发现并加载 commands/ 目录下的所有子命令包

命令格式: commands/<名字>/__init__.py, 以 _ 开头的文件夹跳过。
单个包加载失败只记入 load_errors, 不影响其它命令。
"""

import importlib.util
import sys
from pathlib import Path
from typing import Any

import registry
from config import settings


class CommandLoader:
    def __init__(self, commands_dir: str | Path | None = None):
        self.commands_dir = Path(commands_dir or settings.commands_dir)
        self.loaded_commands: dict[str, Any] = {}
        self.load_errors: list[dict[str, Any]] = []

    def load_all(self) -> dict[str, Any]:
        """加载 commands/ 下所有命令包"""
        if not self.commands_dir.exists():
            print(f"[CommandLoader] Missing commands dir: {self.commands_dir}", file=sys.stderr)
            return {}

        self.load_errors.clear()

        packages: list[tuple[str, Path]] = []
        for item in sorted(self.commands_dir.iterdir()):
            if item.is_dir() and not item.name.startswith("_"):
                init_file = item / "__init__.py"
                if init_file.exists():
                    packages.append((item.name, init_file))

        for name, path in packages:
            try:
                module = self._load_module(name, path)
                self.loaded_commands[name] = module
                if settings.verbose:
                    print(f"[CommandLoader] Loaded: {name}", file=sys.stderr)
            except Exception as exc:
                self.load_errors.append({
                    "file": str(path.relative_to(self.commands_dir)),
                    "error": str(exc),
                })
                print(f"[CommandLoader] Failed to load {name}: {exc}", file=sys.stderr)

        return self.loaded_commands

    def _load_module(self, name: str, file_path: Path) -> Any:
        """动态加载单个命令包"""
        module_name = f"commands.{name}"
        spec = importlib.util.spec_from_file_location(
            module_name,
            file_path,
            submodule_search_locations=[str(file_path.parent)],
        )
        if spec is None or spec.loader is None:
            raise ImportError(f"Cannot load spec for {file_path}")

        module = importlib.util.module_from_spec(spec)

        sys.modules[module_name] = module
        spec.loader.exec_module(module)
        return module

    def reload_all(self) -> dict[str, Any]:
        """清空注册表后重新加载"""
        registry.clear_registry()
        self.loaded_commands.clear()
        return self.load_all()

    def get_status(self) -> dict[str, Any]:
        """获取命令加载状态"""
        unique = {info.name for info in registry.get_registered_commands().values()}
        return {
            "commands_dir": str(self.commands_dir),
            "loaded_count": len(self.loaded_commands),
            "loaded_commands": list(self.loaded_commands.keys()),
            "errors": self.load_errors,
            "commands_count": len(unique),
            "checks_count": len(registry.get_registered_checks()),
        }
