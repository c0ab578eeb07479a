"""
报告模块 - 确定性 JSON 报告、CSV 表格投影、时间戳旁车文件

报告结构:
    {"ok": true, "command": ..., "config_hash": ..., "grids": {...},
     "result": {...}, "diagnostics": [...], "schema_version": "1"}

同一配置 + 同一种子 ⇒ 字节相同的报告; 墙钟时间只写进 <out>.meta.json。
复数写成 [re, im], numpy 数组写成列表, 非有限浮点写成 null。
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from config import settings
from errors import ClarkLabError, ReportIOError
from schemas import RunConfig


def plain(value: Any) -> Any:
    """转换成可以 JSON 序列化的纯 Python 值"""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [plain(float(value.real)), plain(float(value.imag))]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if hasattr(value, "to_dict"):
        return plain(value.to_dict())
    return value


def dumps(document: Any) -> str:
    return json.dumps(plain(document), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def config_hash(config: RunConfig) -> str:
    """RunConfig (不含输出位置) 规范 JSON 的 SHA-256"""
    canonical = json.dumps(plain(config.hashable_dict()), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def grids_of(config: RunConfig) -> dict[str, Any]:
    """报告里的 grids 字段: 本次运行的网格参数 (不含线程数)"""
    return {
        "alpha_nodes": config.alpha_nodes,
        "radii": list(config.radii),
        "angular_nodes": config.angular_nodes,
        "circle_nodes": config.circle_nodes,
        "samples": config.samples,
        "directions": config.directions,
        "mode": config.mode,
        "seed": config.seed,
        "max_circle_nodes_d1": settings.max_circle_nodes_d1,
        "max_circle_nodes": settings.max_circle_nodes,
        "quadrature_rtol": settings.quadrature_rtol,
    }


def build_report(config: RunConfig, result: dict[str, Any], diagnostics: list[dict[str, str]]) -> dict[str, Any]:
    notes = sorted({(n["source"], n["message"]) for n in diagnostics})
    return {
        "ok": True,
        "command": config.command,
        "config_hash": config_hash(config),
        "grids": grids_of(config),
        "result": result,
        "diagnostics": [{"source": s, "message": m} for s, m in notes],
        "schema_version": settings.report_schema_version,
    }


def error_envelope(exc: ClarkLabError) -> dict[str, Any]:
    return exc.to_dict()


def print_error(envelope: dict[str, Any]) -> None:
    print(json.dumps(plain(envelope), sort_keys=True, ensure_ascii=False), file=sys.stderr)


# === CSV ===


def table_csv(rows: list[dict[str, Any]]) -> str:
    if not rows:
        return ""
    columns = list(rows[0].keys())
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in columns})
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    value = plain(value)
    if isinstance(value, list):
        return json.dumps(value)
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else value


def _table_path(out: Path, name: str, count: int) -> Path:
    if count == 1:
        return out
    return out.with_name(f"{out.stem}_{name}{out.suffix or '.csv'}")


# === 写出 ===


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"cannot write {path}: {exc}", module="reports", operation="write_report") from exc


def write_report(
    report: dict[str, Any],
    config: RunConfig,
    tables: dict[str, list[dict[str, Any]]] | None = None,
    started: float | None = None,
) -> list[Path]:
    """按 config.format 写出报告; out 为空时写到 stdout, 返回写出的文件"""
    tables = tables or {}
    if config.format == "csv" and tables:
        if config.out is None:
            for name, rows in tables.items():
                sys.stdout.write(f"# {name}\n{table_csv(rows)}")
            return []
        out = Path(config.out)
        written = []
        for name, rows in tables.items():
            path = _table_path(out, name, len(tables))
            _write(path, table_csv(rows))
            written.append(path)
        _write_sidecar(out, report, started)
        return written

    text = dumps(report)
    if config.out is None:
        sys.stdout.write(text)
        return []
    out = Path(config.out)
    _write(out, text)
    _write_sidecar(out, report, started)
    return [out]


def _write_sidecar(out: Path, report: dict[str, Any], started: float | None) -> None:
    meta = {
        "config_hash": report.get("config_hash"),
        "written_at": datetime.now(timezone.utc).isoformat(),
        "runtime_seconds": None if started is None else round(time.time() - started, 3),
        "threads": settings.threads,
        "version": settings.version,
        "settings": settings.to_dict(),
    }
    _write(out.with_name(out.name + ".meta.json"), dumps(meta))
