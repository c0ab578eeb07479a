"""
modelspace 子命令 - K_I 上的 Clark 酉算子 Gram 校验、伴随往返、K_I* 成员判定
"""

import numpy as np

from kernels import sample_ball
from modelspace import atom_norm, gram_test, ksmall_member, repkernel, roundtrip_residual
from registry import CommandResult, arg, command
from runner import require_symbol
from schemas import RunConfig, parse_coefficients


@command(
    "modelspace",
    description="模型空间: Gram 校验 / 伴随往返 / K_I* 成员判定",
    arguments=[
        arg("--basis", help="核展开基点, 逗号分隔 (默认 0)"),
        arg("--member", help="多项式 f 的升幂系数, 判定 f ∈ K_I*"),
        arg("--nodes", type=int, default=1024, help="成员判定的圆周节点数"),
        arg("--test-points", type=int, default=10, help="伴随往返的内点数"),
    ],
)
def modelspace_cmd(config: RunConfig) -> CommandResult:
    I = require_symbol(config)
    alpha = config.alpha_value() or 1 + 0j
    opts = config.options
    result: dict = {}
    tables: dict = {}

    if opts.get("member"):
        membership = ksmall_member(I, parse_coefficients(opts["member"]), int(opts.get("nodes", 1024)))
        result["membership"] = membership.to_dict()
        tables["membership"] = [
            {"index": k, "re": v.real, "im": v.imag} for k, v in sorted(membership.coefficients.items())
        ]
        if not opts.get("basis"):
            return CommandResult(result, tables=tables)

    basis = parse_coefficients(opts["basis"]) if opts.get("basis") else [0j]
    gram = gram_test(I, alpha, basis)
    z = sample_ball(1, int(opts.get("test_points", 10)), config.seed)[:, 0]
    result["gram"] = gram.to_dict()
    result["roundtrip_residual"] = max(roundtrip_residual(I, alpha, w, z) for w in basis)
    result["parseval_residual"] = max(abs(atom_norm(I, alpha, w) - repkernel(I, w, w).real) for w in basis)
    tables["gram"] = [
        {"i": i, "j": j, "unitary": complex(gram.unitary[i, j]), "kernel": complex(gram.kernel[i, j])}
        for i in range(len(basis))
        for j in range(len(basis))
    ]
    result["basis"] = [[w.real, w.imag] for w in np.asarray(basis, dtype=complex)]
    return CommandResult(result, tables=tables)
