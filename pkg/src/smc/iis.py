"""src/smc/iis.py — 删除过滤法求不可行文字子集"""
from __future__ import annotations

import logging
from typing import Callable, Iterable, Mapping

from src.errors import NotInfeasible, NumericalFailure
from src.smc.lp import LP_TOL, lp_feasible
from src.smc.types import Conflict, Constraint, Feasible, Infeasible, LinearConstraintSystem, LpResult

logger = logging.getLogger(__name__)

# 给定文字集合，返回其 LP 判定结果
LiteralOracle = Callable[[list[int]], LpResult]


def deletion_filter(literals: Iterable[int], oracle: LiteralOracle) -> Conflict:
    """
    逐个尝试删除文字，删除后仍不可行则永久删除；保留至少一个文字

    结果对单文字删除是极小的；数值失败时保守地保留该文字。
    """
    core = list(literals)
    if isinstance(oracle(core), Feasible):
        raise NotInfeasible("literal set is feasible together with the base system")
    for lit in list(core):
        if len(core) == 1:
            break
        trial = [l for l in core if l != lit]
        try:
            result = oracle(trial)
        except NumericalFailure:
            logger.debug(f"删除文字 {lit} 时 LP 数值失败，保留")
            continue
        if isinstance(result, Infeasible):
            core = trial
    return Conflict(literals=tuple(core))


def extract_iis(
    base: LinearConstraintSystem,
    literals: Iterable[int],
    guarded: Mapping[int, list[Constraint]],
    tol: float = LP_TOL,
) -> Conflict:
    """
    base + guarded(literals) 不可行时，返回对单文字删除极小的冲突

    Raises:
        NotInfeasible: base + guarded(literals) 实际可行
    """
    def oracle(lits: list[int]) -> LpResult:
        extra = [c for l in lits for c in guarded.get(l, [])]
        return lp_feasible(base.extended(extra), tol)

    return deletion_filter(literals, oracle)
