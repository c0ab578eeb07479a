"""
clark 子命令 - 单个 α 或整个 α 网格上的 Clark 测度数据
"""

import numpy as np

from clark import (
    ClarkData,
    clark_data,
    clark_family,
    slice_singular_mass,
    verify_cauchy_plus,
    verify_double_cauchy,
    verify_herglotz,
)
from errors import SymbolValidationError
from kernels import circle_nodes, sample_ball
from registry import CommandResult, arg, command
from runner import plan_for, require_symbol
from schemas import RunConfig, symbol_document


def _check_budget(data: ClarkData) -> None:
    """奇异质量显著为负说明 φ 不是自映射"""
    if not data.budget_ok:
        raise SymbolValidationError(
            f"negative singular mass {data.singular_mass:.6g} (se {data.ac_mass_se:.3g})",
            module="clark",
            operation="clark_data",
            details={"alpha": data.alpha},
        )


def _row(data: ClarkData) -> dict:
    return {
        "alpha_arg": float(np.mod(np.angle(data.alpha), 2 * np.pi)),
        "total_mass": data.total_mass,
        "ac_mass": data.ac_mass,
        "ac_mass_se": data.ac_mass_se,
        "singular_mass": data.singular_mass,
    }


@command(
    "clark",
    description="Clark 测度: 总质量 / a.c. 质量 / 奇异质量 / 原子",
    arguments=[
        arg("--identities", type=int, default=0, help="在 N 个随机内点上校验 Herglotz、Cauchy 变换闭式与双 Cauchy 恒等式"),
        arg("--slice-route", action="store_true", help="d ≥ 2 时给出切片路线的奇异质量"),
    ],
)
def clark_cmd(config: RunConfig) -> CommandResult:
    phi = require_symbol(config)
    plan = plan_for(config, phi.dim)
    alpha = config.alpha_value()

    if alpha is None:
        family = clark_family(phi, circle_nodes(config.alpha_nodes).nodes, plan)
        for data in family:
            _check_budget(data)
        rows = [_row(d) for d in family]
        best = max(rows, key=lambda r: r["singular_mass"])
        result = {
            "symbol": symbol_document(phi),
            "per_alpha": [d.to_dict() for d in family],
            "max_singular_mass": best["singular_mass"],
            "argmax_alpha": best["alpha_arg"],
        }
        return CommandResult(result, tables={"masses": rows})

    data = clark_data(phi, alpha, plan)
    _check_budget(data)
    result = {"symbol": symbol_document(phi), "clark": data.to_dict()}

    count = int(config.options.get("identities") or 0)
    if count > 0:
        points = sample_ball(phi.dim, count, config.seed)
        others = sample_ball(phi.dim, count, config.seed + 1)
        result["herglotz_residual"] = verify_herglotz(phi, alpha, data, points, plan).to_dict()
        result["cauchy_plus_residual"] = verify_cauchy_plus(phi, alpha, data, points, plan).to_dict()
        result["double_cauchy_residual"] = verify_double_cauchy(
            phi, alpha, data, list(zip(points, others)), plan
        ).to_dict()
    if config.options.get("slice_route") and phi.dim > 1:
        result["slice_singular_mass"] = slice_singular_mass(phi, alpha, plan).to_dict()

    tables = {"masses": [_row(data)]}
    if data.atom_points is not None:
        tables["atoms"] = [
            {"arg": float(np.mod(np.angle(z), 2 * np.pi)), "re": float(z.real), "im": float(z.imag), "weight": float(w)}
            for z, w in zip(np.ravel(data.atom_points), data.atom_weights)
        ]
    return CommandResult(result, tables=tables)
