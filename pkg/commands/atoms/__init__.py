"""
atoms 子命令 - d=1 的 Clark 原子 (Blaschke 积的全部原子, 或多项式/有理符号的接触点原子)
"""

import numpy as np

from clark import clark_atoms_d1, clark_contact_atoms_d1, clark_data
from errors import InvalidArgumentError, UnsupportedSymbolError
from registry import CommandResult, arg, command
from runner import require_symbol
from schemas import RunConfig


@command(
    "atoms",
    description="d=1 Clark 原子与权重 1/|φ′(ζ)|",
    arguments=[arg("--sort", choices=["arg", "weight"], default="arg", help="原子排序方式")],
)
def atoms_cmd(config: RunConfig) -> CommandResult:
    phi = require_symbol(config)
    if phi.dim != 1:
        raise UnsupportedSymbolError("atoms needs a d=1 symbol", module="atoms", operation="atoms")
    alpha = config.alpha_value()
    if alpha is None:
        raise InvalidArgumentError("atoms needs --alpha", module="atoms", operation="atoms")

    blaschke = phi.as_blaschke()
    if blaschke is not None:
        points, weights = clark_atoms_d1(blaschke, alpha)
        route = "blaschke"
    else:
        points, weights = clark_contact_atoms_d1(phi, alpha)
        route = "contact"
    points = np.ravel(points)

    rows = [
        {"arg": float(np.mod(np.angle(z), 2 * np.pi)), "re": float(z.real), "im": float(z.imag), "weight": float(w)}
        for z, w in zip(points, weights)
    ]
    if config.options.get("sort") == "weight":
        rows.sort(key=lambda r: -r["weight"])

    data = clark_data(phi, alpha)
    weight_sum = float(np.sum(weights))
    result = {
        "alpha": [alpha.real, alpha.imag],
        "route": route,
        "atoms": rows,
        "weight_sum": weight_sum,
        "singular_mass": data.singular_mass,
        "budget_gap": abs(weight_sum - data.singular_mass),
    }
    return CommandResult(result, tables={"atoms": rows})
