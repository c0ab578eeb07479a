"""
统一配置模块 - 所有环境变量和默认网格集中管理

使用方式:
    from config import settings

    print(settings.threads)
    print(settings.alpha_nodes)
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


def _env_bool(key: str, default: bool = False) -> bool:
    """解析布尔类型环境变量"""
    val = os.getenv(key, "").strip().lower()
    if not val:
        return default
    return val in {"1", "true", "yes", "on"}


def _env_int(key: str, default: int) -> int:
    """解析整数类型环境变量"""
    val = os.getenv(key, "").strip()
    if not val:
        return default
    try:
        return int(val)
    except ValueError:
        return default


def _env_float(key: str, default: float) -> float:
    """解析浮点类型环境变量"""
    val = os.getenv(key, "").strip()
    if not val:
        return default
    try:
        return float(val)
    except ValueError:
        return default


def _env_list(key: str, sep: str = ",") -> list[str]:
    """解析列表类型环境变量"""
    val = os.getenv(key, "").strip()
    if not val:
        return []
    return [item.strip() for item in val.split(sep) if item.strip()]


def _env_radii(key: str, default: tuple[float, ...]) -> tuple[float, ...]:
    items = _env_list(key)
    if not items:
        return default
    try:
        return tuple(float(item) for item in items)
    except ValueError:
        return default


@dataclass
class Settings:
    """应用配置"""

    # === 基础配置 ===
    app_name: str = "clark-lab"
    version: str = "1.0.0"
    report_schema_version: str = "1"

    # === 运行环境 ===
    threads: int = field(default_factory=lambda: _env_int("CLARKLAB_THREADS", 1))
    seed: int = field(default_factory=lambda: _env_int("CLARKLAB_SEED", 0))
    corpus_dir: Path = field(
        default_factory=lambda: Path(
            os.getenv("CLARKLAB_CORPUS_DIR", os.path.join(os.path.dirname(os.path.abspath(__file__)), "corpus"))
        )
    )
    commands_dir: Path = field(
        default_factory=lambda: Path(
            os.getenv("CLARKLAB_COMMANDS_DIR", os.path.join(os.path.dirname(os.path.abspath(__file__)), "commands"))
        )
    )

    # === 默认网格 ===
    alpha_nodes: int = field(default_factory=lambda: _env_int("CLARKLAB_ALPHA_NODES", 256))
    circle_nodes: int = field(default_factory=lambda: _env_int("CLARKLAB_CIRCLE_NODES", 64))
    sphere_samples: int = field(default_factory=lambda: _env_int("CLARKLAB_SPHERE_SAMPLES", 100_000))
    directions: int = field(default_factory=lambda: _env_int("CLARKLAB_DIRECTIONS", 2048))
    radii: tuple[float, ...] = field(
        default_factory=lambda: _env_radii("CLARKLAB_RADII", (0.9, 0.99, 0.999, 0.9999))
    )
    angular_nodes: int = field(default_factory=lambda: _env_int("CLARKLAB_ANGULAR_NODES", 512))
    disk_radial: int = field(default_factory=lambda: _env_int("CLARKLAB_DISK_RADIAL", 64))
    disk_angular: int = field(default_factory=lambda: _env_int("CLARKLAB_DISK_ANGULAR", 128))
    stanton_directions: int = field(default_factory=lambda: _env_int("CLARKLAB_STANTON_DIRECTIONS", 256))

    # === 自适应求积 ===
    max_circle_nodes_d1: int = field(default_factory=lambda: _env_int("CLARKLAB_MAX_CIRCLE_NODES_D1", 2**20))
    max_circle_nodes: int = field(default_factory=lambda: _env_int("CLARKLAB_MAX_CIRCLE_NODES", 2**14))
    quadrature_rtol: float = field(default_factory=lambda: _env_float("CLARKLAB_QUADRATURE_RTOL", 1e-13))

    # === 上限 ===
    max_polynomial_degree: int = field(default_factory=lambda: _env_int("CLARKLAB_MAX_POLYNOMIAL_DEGREE", 32))
    max_product_factors: int = field(default_factory=lambda: _env_int("CLARKLAB_MAX_PRODUCT_FACTORS", 32))
    max_atomic_degree: int = 16
    max_samples: int = 10_000_000
    max_alpha_nodes: int = 65_536

    # === 一致性判定 ===
    compact_threshold: float = field(default_factory=lambda: _env_float("CLARKLAB_COMPACT_THRESHOLD", 0.05))
    verdict_abs_tol: float = field(default_factory=lambda: _env_float("CLARKLAB_VERDICT_ABS_TOL", 0.02))
    verdict_rel_tol: float = field(default_factory=lambda: _env_float("CLARKLAB_VERDICT_REL_TOL", 0.05))

    # === 告警 ===
    quiet: bool = field(default_factory=lambda: _env_bool("CLARKLAB_QUIET", False))
    verbose: bool = field(default_factory=lambda: _env_bool("CLARKLAB_VERBOSE", False))

    def __post_init__(self):
        """初始化后处理 - 线程数至少为 1"""
        self.threads = max(1, self.threads)

    def to_dict(self) -> dict[str, Any]:
        """转换为字典 (写入 <out>.meta.json)"""
        return {
            "app_name": self.app_name,
            "version": self.version,
            "alpha_nodes": self.alpha_nodes,
            "circle_nodes": self.circle_nodes,
            "sphere_samples": self.sphere_samples,
            "directions": self.directions,
            "radii": list(self.radii),
            "angular_nodes": self.angular_nodes,
            "disk_radial": self.disk_radial,
            "disk_angular": self.disk_angular,
            "stanton_directions": self.stanton_directions,
            "max_circle_nodes_d1": self.max_circle_nodes_d1,
            "max_circle_nodes": self.max_circle_nodes,
            "quadrature_rtol": self.quadrature_rtol,
        }


# 全局配置实例
settings = Settings()
