"""src/smc/solver.py — 单调 SMC 求解：SAT 枚举相位 + LP 检查 + IIS 冲突学习"""
from __future__ import annotations

import logging
import time
from typing import Sequence

import numpy as np
from pysat.solvers import Solver

from src.budget import SolverBudget, exhausted, start
from src.errors import ResourceLimit
from src.smc.encoding import MonotoneSmcProblem, encode_region
from src.smc.iis import deletion_filter
from src.smc.lp import LP_TOL, solve_arrays
from src.smc.types import (
    Conflict,
    Constraint,
    Feasible,
    Infeasible,
    LpResult,
    PreprocessResult,
    SmcOutcome,
    Witness,
)

logger = logging.getLogger(__name__)

DEFAULT_BACKEND = "m22"


class _LpOracle:
    """基础系统预编译一次；每次调用只追加所选文字的受保护行"""

    def __init__(self, problem: MonotoneSmcProblem, tol: float = LP_TOL):
        self.problem = problem
        self.tol = tol
        self.n = len(problem.base.variables)
        self.A_ub, self.b_ub, self.A_eq, self.b_eq = problem.base.compile()
        self._rows: dict[int, tuple[list[np.ndarray], list[float], list[np.ndarray], list[float]]] = {
            lit: self._compile(cons) for lit, cons in problem.guarded.items()
        }
        self.calls = 0

    def _compile(self, cons: list[Constraint]):
        ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
        for c in cons:
            row = np.zeros(self.n)
            for idx, coef in c.terms:
                row[idx] += coef
            if c.sense == "==":
                eq_rows.append(row)
                eq_rhs.append(c.rhs)
            elif c.sense == ">=":
                ub_rows.append(-row)
                ub_rhs.append(-c.rhs)
            else:
                ub_rows.append(row)
                ub_rhs.append(c.rhs)
        return ub_rows, ub_rhs, eq_rows, eq_rhs

    def __call__(self, literals: Sequence[int]) -> LpResult:
        self.calls += 1
        ub_rows, ub_rhs, eq_rows, eq_rhs = [self.A_ub], [self.b_ub], [self.A_eq], [self.b_eq]
        for lit in literals:
            a, b, c, d = self._rows.get(lit, ([], [], [], []))
            if a:
                ub_rows.append(np.array(a))
                ub_rhs.append(np.array(b))
            if c:
                eq_rows.append(np.array(c))
                eq_rhs.append(np.array(d))
        return solve_arrays(
            np.vstack(ub_rows), np.concatenate(ub_rhs),
            np.vstack(eq_rows), np.concatenate(eq_rhs),
            self.n, self.tol,
        )


def _assignment(model: list[int] | None, bool_count: int) -> list[int]:
    """SAT 模型 → 完整文字列表；模型中缺失的变量取 False"""
    truth = {abs(l): l > 0 for l in (model or [])}
    return [k if truth.get(k, False) else -k for k in range(1, bool_count + 1)]


def _check_budget(budget: SolverBudget | None, conflicts: int) -> None:
    reason = exhausted(budget, conflicts)
    if reason is not None:
        raise ResourceLimit(reason)


def smc_solve(
    problem: MonotoneSmcProblem,
    budget: SolverBudget | None = None,
    backend: str = DEFAULT_BACKEND,
    tol: float = LP_TOL,
) -> SmcOutcome:
    """
    求解单调 SMC 问题

    先单独检查基础系统；随后 SAT 求解器给出完整相位赋值，LP 检查其凸约束，
    不可行时用删除过滤得到冲突并把其否定作为子句加入，直到找到见证或布尔空间耗尽。

    Raises:
        ResourceLimit: 超出时间或冲突预算（不同于 UNSAT）
    """
    budget = start(budget) if budget is not None else None
    oracle = _LpOracle(problem, tol)
    conflicts: list[Conflict] = []

    if isinstance(oracle([]), Infeasible):
        return SmcOutcome(status="UNSAT", lp_calls=oracle.calls)

    with Solver(name=backend, bootstrap_with=[list(c) for c in problem.learned_clauses]) as sat:
        while True:
            _check_budget(budget, len(conflicts))
            if not sat.solve():
                return SmcOutcome(status="UNSAT", conflicts_generated=conflicts, lp_calls=oracle.calls)
            literals = _assignment(sat.get_model(), problem.bool_count)
            result = oracle(literals)
            if isinstance(result, Feasible):
                witness = Witness(
                    variables=tuple(problem.base.variables),
                    point=result.point,
                    phases=tuple(l > 0 for l in literals),
                )
                return SmcOutcome(status="SAT", witness=witness, conflicts_generated=conflicts,
                                  lp_calls=oracle.calls)
            if problem.bool_count == 0:
                return SmcOutcome(status="UNSAT", lp_calls=oracle.calls)
            conflict = deletion_filter(literals, oracle)
            conflicts.append(conflict)
            sat.add_clause(list(conflict.clause))


def preprocess_problem(
    problem: MonotoneSmcProblem,
    budget: SolverBudget | None = None,
    backend: str = DEFAULT_BACKEND,
    tol: float = LP_TOL,
) -> PreprocessResult:
    """
    枚举约简问题的全部可行相位：可行时加阻塞子句，不可行时加 IIS 冲突子句，直到布尔空间耗尽

    Raises:
        ResourceLimit: 超出预算
    """
    started = time.perf_counter()
    budget = start(budget) if budget is not None else None
    oracle = _LpOracle(problem, tol)
    feasible: list[tuple[bool, ...]] = []
    conflicts: list[Conflict] = []

    if problem.bool_count == 0:
        if isinstance(oracle([]), Feasible):
            feasible.append(())
        return PreprocessResult(feasible_phases=feasible, lp_calls=oracle.calls,
                                seconds=time.perf_counter() - started)

    with Solver(name=backend, bootstrap_with=[list(c) for c in problem.learned_clauses]) as sat:
        while True:
            _check_budget(budget, len(conflicts) + len(feasible))
            if not sat.solve():
                break
            literals = _assignment(sat.get_model(), problem.bool_count)
            result = oracle(literals)
            if isinstance(result, Feasible):
                feasible.append(tuple(l > 0 for l in literals))
                sat.add_clause([-l for l in literals])
            else:
                conflict = deletion_filter(literals, oracle)
                conflicts.append(conflict)
                sat.add_clause(list(conflict.clause))

    feasible.sort()
    return PreprocessResult(feasible_phases=feasible, conflicts=conflicts, lp_calls=oracle.calls,
                            seconds=time.perf_counter() - started)


def preprocess_region(
    cell,
    maps,
    net,
    budget: SolverBudget | None = None,
    backend: str = DEFAULT_BACKEND,
    tol: float = LP_TOL,
) -> PreprocessResult:
    """
    区域预处理：约简编码（区域成员 + 成像 + 网络）上的完整相位枚举

    返回的冲突即可在该区域所有转移检查中复用的学习子句。
    """
    problem = encode_region(cell, maps, net)
    result = preprocess_problem(problem, budget, backend, tol)
    logger.debug(
        f"预处理: {len(result.feasible_phases)} 个可行相位, {len(result.conflicts)} 个冲突, "
        f"{result.lp_calls} 次 LP, {result.seconds:.3f}s"
    )
    return result
