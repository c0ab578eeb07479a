"""
poltoratski 子命令 - π·y·σ_d({|(σ_α)₊| > y}) 随 y 增大趋于奇异质量
"""

from clark import DISINTEGRATION_TESTS, poltoratski_check
from registry import CommandResult, arg, command
from runner import plan_for, require_symbol
from schemas import RunConfig, parse_coefficients


@command(
    "poltoratski",
    description="Cauchy 变换分布尾部的渐近表",
    arguments=[
        arg("--y", default="10,100,1000", help="y 网格, 逗号分隔"),
        arg("--base-cells", type=int, default=2**16, help="d=1 圆周基础网格单元数"),
        arg("--test-function", choices=["re_z1", "abs_z1_sq"], help="弱 * 形式的测试函数"),
    ],
)
def poltoratski_cmd(config: RunConfig) -> CommandResult:
    phi = require_symbol(config)
    alpha = config.alpha_value() or 1 + 0j
    ys = [v.real for v in parse_coefficients(config.options.get("y", "10,100,1000"))]
    name = config.options.get("test_function")
    res = poltoratski_check(
        phi,
        alpha,
        ys,
        plan=plan_for(config, phi.dim),
        test_function=DISINTEGRATION_TESTS[name] if name else None,
        base_cells=int(config.options.get("base_cells", 2**16)),
    )
    rows = [{"y": y, "scaled_tail": v, "se": se} for y, v, se in res.rows]
    return CommandResult(res.to_dict(), tables={"poltoratski": rows})
