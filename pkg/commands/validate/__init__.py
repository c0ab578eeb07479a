"""
validate 子命令 - 符号的 Schwarz 检查 (|φ| ≤ 1 在边界上), 不通过时退出码 2
"""

from errors import EXIT_VALIDATION
from registry import CommandResult, arg, command
from schemas import RunConfig, load_symbol, symbol_document
from symbols import validate_schwarz


@command(
    "validate",
    description="Schwarz 检查: 符号是否为自映射",
    arguments=[arg("--points", type=int, default=10_000, help="边界检查点数")],
)
def validate_cmd(config: RunConfig) -> CommandResult:
    phi = load_symbol(config.symbol)
    check = validate_schwarz(phi, int(config.options.get("points", 10_000)), config.seed)
    result = {
        "symbol": symbol_document(phi),
        "variant": phi.variant,
        "dim": phi.dim,
        "schwarz": check.to_dict(),
    }
    return CommandResult(result, exit_code=0 if check.passed else EXIT_VALIDATION)
