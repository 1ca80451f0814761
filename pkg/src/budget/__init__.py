"""src/budget — SMC 求解预算（时间 + 冲突次数）"""
from __future__ import annotations

import time
from typing import Optional

from pydantic import BaseModel, Field


class SolverBudget(BaseModel):
    """单次 smc_solve / preprocess_region 调用的资源预算"""
    time_limit_s: float = Field(60.0, gt=0)
    conflict_limit: int = Field(100_000, gt=0)
    started_at: float | None = None        # time.monotonic() 时间戳


def create_budget(time_limit_s: float = 60.0, conflict_limit: int = 100_000) -> SolverBudget:
    """创建一个已开始计时的预算对象"""
    return SolverBudget(
        time_limit_s=time_limit_s,
        conflict_limit=conflict_limit,
        started_at=time.monotonic(),
    )


def start(budget: SolverBudget) -> SolverBudget:
    """从现在开始计时，返回新对象（不可变）；同一份配置预算可反复用于不同检查"""
    return budget.model_copy(update={"started_at": time.monotonic()})


def elapsed(budget: Optional[SolverBudget]) -> float:
    """已用秒数；未开始计时返回 0"""
    if budget is None or budget.started_at is None:
        return 0.0
    return time.monotonic() - budget.started_at


def is_overtime(budget: Optional[SolverBudget]) -> bool:
    """检查预算是否已超时"""
    if budget is None:
        return False
    return elapsed(budget) >= budget.time_limit_s


def exhausted(budget: Optional[SolverBudget], conflicts: int) -> str | None:
    """超时或冲突数超限时返回原因字符串，否则 None"""
    if budget is None:
        return None
    if conflicts >= budget.conflict_limit:
        return f"conflict limit {budget.conflict_limit} reached"
    if is_overtime(budget):
        return f"time limit {budget.time_limit_s:g}s reached"
    return None


__all__ = [
    "SolverBudget",
    "create_budget",
    "start",
    "elapsed",
    "is_overtime",
    "exhausted",
]
