"""
disintegrate 子命令 - ∫_T ∫ f dσ_α dm(α) = ∫ f dσ_d 的数值校验
"""

from clark import DISINTEGRATION_TESTS, disintegration_check
from registry import CommandResult, arg, command
from runner import plan_for, require_symbol
from schemas import RunConfig

TOLERANCE = 1e-8


@command(
    "disintegrate",
    description="Clark 测度对 α 的平均等于 σ_d",
    arguments=[
        arg("--test", choices=[*DISINTEGRATION_TESTS, "all"], default="all", help="测试函数 f"),
    ],
)
def disintegrate_cmd(config: RunConfig) -> CommandResult:
    phi = require_symbol(config)
    plan = plan_for(config, phi.dim)
    chosen = config.options.get("test", "all")
    names = list(DISINTEGRATION_TESTS) if chosen == "all" else [chosen]

    tests = {}
    rows = []
    for name in names:
        res = disintegration_check(phi, DISINTEGRATION_TESTS[name], config.alpha_nodes, plan)
        allowed = max(TOLERANCE, 3.0 * res.residual.se)
        passed = float(res.residual.value) <= allowed
        tests[name] = {**res.to_dict(), "allowed": allowed, "passed": passed}
        rows.append({
            "test": name,
            "residual": float(res.residual.value),
            "se": res.residual.se,
            "allowed": allowed,
            "passed": passed,
        })
    return CommandResult({"tests": tests, "passed": all(r["passed"] for r in rows)}, tables={"disintegration": rows})
