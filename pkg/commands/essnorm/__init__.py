"""
essnorm 子命令 - ‖C_φ‖²_e 的三个估计量 (B̂_σ, B̂_N, 测试函数下界) 与一致性结论

展示层给出 ‖C_φ‖_e = sqrt(B̂_σ); 报告本身只含三个估计量。
"""

import math
import sys

from config import settings
from essnorm import essential_norm_report
from registry import CommandResult, arg, command
from runner import plan_for, require_symbol
from schemas import RunConfig, symbol_document


@command(
    "essnorm",
    description="复合算子本质范数的三个估计量与一致性结论",
    arguments=[
        arg("--normalization", choices=["one_minus_r", "neg_log"], default="one_minus_r", help="B̂_N 的分母"),
    ],
)
def essnorm_cmd(config: RunConfig) -> CommandResult:
    phi = require_symbol(config)
    report = essential_norm_report(
        phi,
        alpha_nodes=config.alpha_nodes,
        radii=config.radii,
        angular=config.angular_nodes,
        plan=plan_for(config, phi.dim),
        seed=config.seed,
        normalization=config.options.get("normalization", "one_minus_r"),
    )
    sigma, counting, lower = report.estimates
    result = report.to_dict()
    result["symbol"] = symbol_document(phi)
    result["presentation"] = {
        "essential_norm_squared": {"bhat_sigma": sigma, "bhat_N": counting, "lower_bound": lower},
        "essential_norm": math.sqrt(max(sigma, 0.0)),
    }
    if not settings.quiet:
        print(
            f"[EssNorm] B̂_σ={sigma:.6g} B̂_N={counting:.6g} lower={lower:.6g} "
            f"‖C_φ‖_e≈{math.sqrt(max(sigma, 0.0)):.6g} ({report.verdict}, compact={report.compact})",
            file=sys.stderr,
        )

    tables = {
        "per_alpha": [{"alpha": a, "singular_mass": m, "se": s} for a, m, s in report.sigma.table],
        "ladder": [{"radius": r, "sup_ratio": v, "se": s} for r, v, s in report.counting.ladder()],
        "lower": [
            {"alpha": ladder.to_dict()["alpha"], "at_largest": ladder.at_largest, "extrapolated": ladder.extrapolated}
            for ladder in report.lower.ladders
        ],
    }
    return CommandResult(result, tables=tables)
