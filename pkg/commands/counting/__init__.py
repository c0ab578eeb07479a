"""
counting 子命令 - 计数函数: B̂_N 半径阶梯、指定 w 的 ∫N dσ、Jensen 上界校验、Stanton 恒等式
"""

from counting import (
    bhat_N,
    integrated_counting,
    jensen_bound_check,
    littlewood_paley_check,
    slice_counting,
    stanton_check,
)
from errors import EXIT_NUMERICAL
from kernels import SphereSamplePlan
from registry import CommandResult, arg, command
from runner import require_symbol
from schemas import RunConfig, parse_coefficients


@command(
    "counting",
    description="Nevanlinna 计数函数表、N ≤ Ñ 校验与 Stanton 恒等式",
    arguments=[
        arg("--target", action="append", help="目标点 w (可重复), 输出 ∫N(w) dσ"),
        arg("--stanton", help="多项式 f 的升幂系数, 逗号分隔, 校验 Stanton 恒等式"),
        arg("--littlewood-paley", action="store_true", help="同时给出 f 的 Littlewood–Paley 网格误差"),
        arg("--bound-samples", type=int, default=0, help="随机 (ζ, w) 个数, 校验 N ≤ Ñ"),
        arg("--no-ladder", action="store_true", help="不计算 B̂_N 阶梯"),
        arg("--normalization", choices=["one_minus_r", "neg_log"], default="one_minus_r"),
    ],
)
def counting_cmd(config: RunConfig) -> CommandResult:
    phi = require_symbol(config)
    opts = config.options
    plan = None
    if phi.dim > 1:
        plan = SphereSamplePlan.monte_carlo(phi.dim, config.directions, config.seed)

    result: dict = {}
    tables: dict = {}
    exit_code = 0

    if not opts.get("no_ladder"):
        ladder = bhat_N(phi, config.radii, config.angular_nodes, plan, opts.get("normalization", "one_minus_r"))
        result["bhat_N"] = ladder.to_dict()
        tables["ladder"] = [{"radius": r, "sup_ratio": v, "se": s} for r, v, s in ladder.ladder()]

    if opts.get("target"):
        rows = []
        for text in opts["target"]:
            (w,) = parse_coefficients(text)
            row = {"w": [w.real, w.imag], "integrated": integrated_counting(phi, w, plan).to_dict()}
            if phi.dim == 1:
                row["slice"] = slice_counting(phi, 1.0, w).to_dict()
            rows.append(row)
        result["targets"] = rows
        tables["targets"] = [
            {"w_re": r["w"][0], "w_im": r["w"][1], "value": r["integrated"]["value"], "se": r["integrated"]["se"]}
            for r in rows
        ]

    if opts.get("stanton"):
        coeffs = parse_coefficients(opts["stanton"])
        check = stanton_check(coeffs, phi)
        result["stanton"] = check.to_dict()
        tables["stanton"] = [{
            "lhs": check.lhs.value,
            "rhs": check.rhs.value,
            "residual": check.residual.value,
            "se": check.residual.se,
        }]
        if opts.get("littlewood_paley"):
            result["littlewood_paley"] = littlewood_paley_check(coeffs).to_dict()

    samples = int(opts.get("bound_samples") or 0)
    if samples > 0:
        bound = jensen_bound_check(phi, samples, config.seed)
        result["jensen_bound"] = bound.to_dict()
        if not bound.passed:
            exit_code = EXIT_NUMERICAL
    return CommandResult(result, tables=tables, exit_code=exit_code)
