"""
verify 子命令 - 验收套件

core 套件按完整样本量运行全部检查; quick 套件用同一批处理函数, 样本量缩小。
单条检查抛出的 ClarkLabError 记为失败, 不中断其余检查。
任意一条失败时退出码 3。
"""

from __future__ import annotations

import sys
import time

import numpy as np

from clark import (
    DISINTEGRATION_TESTS,
    clark_data,
    clark_masses,
    clark_singular_mass,
    default_plan,
    disintegration_check,
    poltoratski_check,
    verify_double_cauchy,
    verify_herglotz,
)
from config import settings
from counting import jensen_bound_check, littlewood_paley_check, stanton_check
from errors import EXIT_NUMERICAL, ClarkLabError
from essnorm import essential_norm_report
from kernels import SphereSamplePlan, circle_nodes, sample_ball
from modelspace import gram_test, roundtrip_residual
from registry import CheckResult, CommandResult, arg, check, command, get_registered_checks
from schemas import RunConfig, corpus_entries, load_symbol
from symbols import Symbol, random_blaschke

STANTON_FUNCTIONS = {
    "1": [1.0],
    "z": [0.0, 1.0],
    "z^2": [0.0, 0.0, 1.0],
    "z^3+0.5z": [0.0, 0.5, 0.0, 1.0],
}


def _blaschke_family() -> dict[str, Symbol]:
    """z, z², z³ 加上五个种子固定的随机 Blaschke 积 (次数 ≤ 8)"""
    family = {name: load_symbol(name) for name in ("z", "z2", "z3")}
    for degree, seed in ((2, 11), (3, 12), (5, 13), (7, 14), (8, 15)):
        family[f"blaschke{degree}_s{seed}"] = random_blaschke(degree, seed=seed)
    return family


def _result(name: str, value: float, tolerance: float, detail: str = "") -> CheckResult:
    value = float(value)
    return CheckResult(name, passed=bool(np.isfinite(value) and value <= tolerance), value=value, tolerance=tolerance, detail=detail)


def _within_se(name: str, estimate, target: float, detail: str = "", floor: float = 1e-10) -> CheckResult:
    gap = abs(float(np.real(estimate.value)) - target)
    return _result(name, gap, max(3.0 * estimate.se, floor), detail)


def _ball2_plan(quick: bool, seed: int = 0) -> SphereSamplePlan:
    return default_plan(2, 10**5 if quick else 10**6, seed)


# === 检查 ===


@check("herglotz", description="P[σ_α] = Re((α+φ)/(α−φ)), Blaschke 原子路线")
def herglotz_check(quick: bool) -> list[CheckResult]:
    points = sample_ball(1, 10 if quick else 50, seed=3)
    alphas = circle_nodes(8, offset=0.5).nodes
    out = []
    for name, phi in _blaschke_family().items():
        worst = max(float(verify_herglotz(phi, a, clark_data(phi, a), points).value) for a in alphas)
        out.append(_result(f"herglotz[{name}]", worst, 1e-10))
    return out


@check("mass-budget", description="(1+z)/2: α=1 奇异质量 2, α=i 奇异质量 0")
def mass_budget_check(quick: bool) -> list[CheckResult]:
    phi = load_symbol("half_plus_half_z")
    at_one = clark_singular_mass(phi, 1.0)
    at_i = clark_singular_mass(phi, 1j)
    return [
        _result("mass-budget[alpha=1]", abs(float(at_one.value) - 2.0), 1e-8),
        _result("mass-budget[alpha=i]", abs(float(at_i.value)), 1e-8),
    ]


@check("dimension-contrast", description="(1+z₁)/2 on B₂, α=1: a.c. 质量 3, 奇异质量 0")
def dimension_contrast_check(quick: bool) -> list[CheckResult]:
    phi = load_symbol("half_plus_half_z1_ball2")
    plan = _ball2_plan(quick)
    data = clark_data(phi, 1.0, plan)
    se = data.ac_mass_se
    detail = f"samples={plan.sample_count} ac={data.ac_mass:.6g}±{se:.3g}"
    return [
        _result("dimension-contrast[ac_mass]", abs(data.ac_mass - 3.0), 3.0 * se, detail),
        _result("dimension-contrast[singular_mass]", abs(data.singular_mass), 3.0 * se, detail),
    ]


@check("compactness", description="z₁ on B₂: 各 α 上 a.c. 质量 1, 三个估计量 ≤ 0.05")
def compactness_check(quick: bool) -> list[CheckResult]:
    phi = load_symbol("z1_ball2")
    plan = _ball2_plan(quick)
    alphas = circle_nodes(8 if quick else 32).nodes
    masses = clark_masses(phi, alphas, plan)
    worst = max(abs(float(ac.value) - 1.0) - 3.0 * ac.se for _, ac in masses)
    report = essential_norm_report(
        phi,
        alpha_nodes=16 if quick else settings.alpha_nodes,
        angular=64 if quick else settings.angular_nodes,
        plan=plan,
        seed=0,
    )
    sigma, counting, lower = report.estimates
    detail = f"estimates=({sigma:.4g}, {counting:.4g}, {lower:.4g}) verdict={report.verdict}"
    return [
        _result("compactness[ac_mass]", max(worst, 0.0), 1e-10),
        _result("compactness[estimates]", max(sigma, counting, lower), settings.compact_threshold, detail),
        CheckResult("compactness[verdict]", passed=report.consistent, detail=detail),
    ]


# 目标三元组 (B̂_σ, B̂_N, 下界) 与各自容差: 绝对容差或相对容差
ESSNORM_TRIPLES = {
    "z": ((1.0, 1.0, 1.0), (1e-6, 0.02, 1e-6), (False, True, False)),
    "half_plus_half_z": ((2.0, 2.0, 2.0), (1e-4, 0.05, 0.02), (False, True, True)),
    "const_03": ((0.0, 0.0, 0.0), (1e-6, 1e-6, 1e-6), (False, False, False)),
}


@check("essnorm-triple", description="三个估计量对 z, (1+z)/2, 常数 0.3 的目标值")
def essnorm_triple_check(quick: bool) -> list[CheckResult]:
    out = []
    for name, (targets, tolerances, relative) in ESSNORM_TRIPLES.items():
        report = essential_norm_report(
            load_symbol(name),
            alpha_nodes=64 if quick else settings.alpha_nodes,
            angular=128 if quick else settings.angular_nodes,
            seed=0,
        )
        labels = ("bhat_sigma", "bhat_N", "lower_bound")
        for label, value, target, tol, rel in zip(labels, report.estimates, targets, tolerances, relative):
            allowed = tol * abs(target) if rel else tol
            out.append(_result(f"essnorm-triple[{name}.{label}]", abs(value - target), allowed, f"value={value:.8g}"))
        out.append(CheckResult(f"essnorm-triple[{name}.verdict]", passed=report.consistent, detail=report.verdict))
    return out


@check("disintegration", description="α 平均的 Clark 测度等于 σ_d, 对全部语料")
def disintegration_suite(quick: bool) -> list[CheckResult]:
    out = []
    for name, phi in corpus_entries().items():
        plan = None if phi.dim == 1 else default_plan(phi.dim, 10**4 if quick else settings.sphere_samples, 0)
        for test, f in DISINTEGRATION_TESTS.items():
            res = disintegration_check(phi, f, 64 if quick else 256, plan)
            out.append(_within_se(f"disintegration[{name}.{test}]", res.residual, 0.0, floor=1e-8))
    return out


@check("double-cauchy", description="∫C(z,ζ)C(ζ,w)dσ_α 的闭式, 原子路线与 Monte Carlo 路线")
def double_cauchy_check(quick: bool) -> list[CheckResult]:
    z = sample_ball(1, 10, seed=5)
    w = sample_ball(1, 10, seed=6)
    pairs = list(zip(z, w))
    out = []
    for name, phi in _blaschke_family().items():
        worst = max(float(verify_double_cauchy(phi, a, clark_data(phi, a), pairs).value) for a in (1.0, 1j, -1.0))
        out.append(_result(f"double-cauchy[{name}]", worst, 1e-10))

    phi = load_symbol("half_plus_half_z1_ball2")
    plan = _ball2_plan(quick)
    z2 = sample_ball(2, 3 if quick else 10, seed=7, max_radius=0.5)
    w2 = sample_ball(2, 3 if quick else 10, seed=8, max_radius=0.5)
    for alpha, label in ((-1.0, "-1"), (1j, "i")):
        res = verify_double_cauchy(phi, alpha, clark_data(phi, alpha, plan), list(zip(z2, w2)), plan)
        out.append(_within_se(f"double-cauchy[half_plus_half_z1_ball2.alpha={label}]", res, 0.0))
    return out


@check("stanton", description="‖f∘φ‖² = |f(φ(0))|² + 2∫|f′|²∫N dσ dA, 对全部语料")
def stanton_suite(quick: bool) -> list[CheckResult]:
    out = []
    for name, phi in corpus_entries().items():
        plan = None
        if phi.dim > 1 and quick:
            plan = SphereSamplePlan.slice_product(phi.dim, 32, settings.circle_nodes, 0)
        for label, coeffs in STANTON_FUNCTIONS.items():
            res = stanton_check(coeffs, phi, plan)
            out.append(_within_se(f"stanton[{name}.{label}]", res.residual, 0.0, floor=1e-6))
    return out


@check("littlewood-paley", description="圆盘网格的 Littlewood–Paley 自检", suites=("core",))
def littlewood_paley_suite(quick: bool) -> list[CheckResult]:
    out = []
    for label, coeffs in STANTON_FUNCTIONS.items():
        res = littlewood_paley_check(coeffs)
        out.append(_within_se(f"littlewood-paley[{label}]", res.residual, 0.0, floor=1e-6))
    return out


@check("clark-unitary", description="U_α 的 Gram 校验与 U_α* U_α 往返")
def clark_unitary_check(quick: bool) -> list[CheckResult]:
    basis = sample_ball(1, 8, seed=9, max_radius=0.8)[:, 0]
    test_points = sample_ball(1, 10, seed=10)[:, 0]
    alphas = (1.0, 1j) if quick else tuple(circle_nodes(4, offset=0.5).nodes)
    out = []
    for name, I in _blaschke_family().items():
        gram = max(gram_test(I, a, basis).residual for a in alphas)
        trip = max(roundtrip_residual(I, a, w, test_points) for a in alphas for w in basis[:3])
        out.append(_result(f"clark-unitary[{name}.gram]", gram, 1e-8))
        out.append(_result(f"clark-unitary[{name}.roundtrip]", trip, 1e-10))
    return out


@check("poltoratski", description="π·y·σ({|(σ_α)₊| > y}) 在 y = 10³ 处趋于奇异质量")
def poltoratski_suite(quick: bool) -> list[CheckResult]:
    out = []
    for name, target, rel in (("z", 1.0, 0.1), ("half_plus_half_z", 2.0, 0.1)):
        res = poltoratski_check(load_symbol(name), 1.0, [1000.0])
        _, value, _ = res.rows[-1]
        out.append(_result(f"poltoratski[{name}]", abs(value - target), rel * target, f"value={value:.6g}"))
    return out


@check("counting-bound", description="N ≤ Ñ 在随机样本上成立, 内函数切片上取等")
def counting_bound_check(quick: bool) -> list[CheckResult]:
    out = []
    for name in ("z2", "half_plus_half_z", "random_blaschke6", "z1z2_ball2", "half_plus_half_z1_ball2"):
        bound = jensen_bound_check(load_symbol(name), 100 if quick else 1000, seed=0)
        detail = f"max_excess={bound.max_excess:.3g} equality_gap={bound.equality_gap}"
        out.append(CheckResult(f"counting-bound[{name}]", passed=bound.passed, value=bound.max_excess,
                               tolerance=bound.tolerance, detail=detail))
    return out


# === 命令 ===


def _run_check(info, quick: bool) -> tuple[list[CheckResult], float]:
    started = time.perf_counter()
    try:
        outcome = info.handler(quick)
        results = outcome if isinstance(outcome, list) else [outcome]
    except ClarkLabError as exc:
        results = [CheckResult(info.name, passed=False, detail=exc.describe())]
    return results, time.perf_counter() - started


@command(
    "verify",
    description="验收套件: core (完整样本量) / quick",
    arguments=[
        arg("--suite", choices=["core", "quick"], default="core", help="套件名"),
        arg("--only", help="只运行这些检查, 逗号分隔"),
    ],
    needs_symbol=False,
)
def verify_cmd(config: RunConfig) -> CommandResult:
    quick = config.suite == "quick"
    only = {name.strip() for name in (config.options.get("only") or "").split(",") if name.strip()}
    checks = [info for info in get_registered_checks(config.suite) if not only or info.name in only]

    rows = []
    summary = {}
    for info in checks:
        results, seconds = _run_check(info, quick)
        passed = all(r.passed for r in results)
        summary[info.name] = {"passed": passed, "results": [r.to_dict() for r in results]}
        rows.extend({**r.to_dict(), "check": info.name} for r in results)
        if not settings.quiet:
            state = "ok" if passed else "FAILED"
            print(f"[Verify] {info.name}: {state} ({seconds:.1f}s)", file=sys.stderr)

    failed = sorted(name for name, item in summary.items() if not item["passed"])
    result = {"suite": config.suite, "checks": summary, "failed": failed, "passed": not failed}
    return CommandResult(result, tables={"checks": rows}, exit_code=EXIT_NUMERICAL if failed else 0)
