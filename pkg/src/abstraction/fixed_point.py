"""src/abstraction/fixed_point.py — 不安全集不动点与安全初始集 X_safe"""
from __future__ import annotations

import logging
from collections import defaultdict
from typing import Any, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.abstraction.states import StateSpace
from src.abstraction.types import StateCell, TransitionSystem
from src.geometry.types import TOL

logger = logging.getLogger(__name__)


class FixedPoint(NamedTuple):
    unsafe: list[int]       # F_unsafe（不含汇点）
    safe: list[int]         # F_safe = F \ F_unsafe


def predecessors(ts: TransitionSystem) -> dict[int, list[int]]:
    """Pre 的邻接表：t → {s : t ∈ δ_F(s)}"""
    pre: dict[int, list[int]] = defaultdict(list)
    for s in sorted(ts.transitions):
        for t in ts.transitions[s]:
            pre[t].append(s)
    return pre


def unsafe_fixed_point(ts: TransitionSystem) -> FixedPoint:
    """
    F^{k+1} = F^k ∪ Pre(F^k)，直到不动点

    每一轮只展开上一轮新加入的状态；汇点始终视为不安全。
    """
    pre = predecessors(ts)
    unsafe = set(ts.unsafe0) | {ts.sink}
    frontier = sorted(unsafe)
    iterations = 0
    while frontier:
        new = {p for t in frontier for p in pre.get(t, ()) if p not in unsafe}
        if not new:
            break
        iterations += 1
        unsafe |= new
        frontier = sorted(new)

    unsafe.discard(ts.sink)
    safe = [s for s in range(len(ts.states)) if s not in unsafe]
    logger.info(f"不动点: {iterations} 轮, |F_unsafe|={len(unsafe)}, |F_safe|={len(safe)}")
    return FixedPoint(unsafe=sorted(unsafe), safe=safe)


class SafeCell(BaseModel):
    """X_safe 中的一块：区域多边形 × 辅助维区间"""
    model_config = ConfigDict(frozen=True)

    state: int
    region: int
    cell: StateCell

    def to_dict(self) -> dict[str, Any]:
        return {
            "state": self.state,
            "region": self.region,
            "polygon": self.cell.region.to_list(),
            "box": [list(b) for b in self.cell.box],
        }


class SafeSet(BaseModel):
    """X_safe = ∪_{s ∈ F_safe} cell(s)"""
    model_config = ConfigDict(frozen=True)

    cells: tuple[SafeCell, ...] = ()

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def is_empty(self) -> bool:
        return not self.cells

    def contains(self, x: np.ndarray, tol: float = TOL) -> bool:
        return any(c.cell.contains(x, tol) for c in self.cells)

    @property
    def volume(self) -> float:
        """区域面积 × 辅助维区间长度之积的总和"""
        return float(sum(c.cell.region.area * np.prod([hi - lo for lo, hi in c.cell.box]) for c in self.cells))

    def to_dict(self) -> dict[str, Any]:
        return {"cells": [c.to_dict() for c in self.cells]}


def safe_set(safe: list[int], space: StateSpace) -> SafeSet:
    cells = tuple(
        SafeCell(state=s, region=space.states[s].region, cell=space.cell(s))
        for s in sorted(safe)
    )
    return SafeSet(cells=cells)
