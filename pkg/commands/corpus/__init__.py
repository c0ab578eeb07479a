"""
corpus 子命令 - 列出内置语料, 可选写出为符号文件
"""

from pathlib import Path

from errors import ReportIOError
from registry import CommandResult, arg, command
from reports import dumps
from schemas import RunConfig, corpus_entries, symbol_document


@command(
    "corpus",
    description="内置示例语料",
    arguments=[arg("--write", metavar="DIR", help="把每个条目写成 DIR/<名字>.json")],
    needs_symbol=False,
)
def corpus_cmd(config: RunConfig) -> CommandResult:
    entries = corpus_entries()
    rows = [
        {
            "name": name,
            "variant": phi.variant,
            "dim": phi.dim,
            "inner": phi.is_inner,
            "value_at_origin": phi.value_at_origin(),
        }
        for name, phi in entries.items()
    ]
    result = {"entries": {name: symbol_document(phi) for name, phi in entries.items()}}

    target = config.options.get("write")
    if target:
        folder = Path(target)
        try:
            folder.mkdir(parents=True, exist_ok=True)
            for name, doc in result["entries"].items():
                (folder / f"{name}.json").write_text(dumps(doc), encoding="utf-8")
        except OSError as exc:
            raise ReportIOError(f"cannot write corpus to {folder}: {exc}", module="schemas", operation="corpus") from exc
        result["written_to"] = str(folder)
    return CommandResult(result, tables={"corpus": rows})
