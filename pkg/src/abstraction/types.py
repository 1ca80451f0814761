"""src/abstraction/types.py — 有限状态抽象的数据类型

状态下标在代码中一律 0-based：AbstractState.region 为细分区下标，
AbstractState.cell 为各辅助维的超立方体下标。
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.errors import DimensionMismatch, NonDivisibleBounds
from src.geometry.types import TOL, ConvexPolygon, Point2


class Dynamics(BaseModel):
    """x⁺ = A x + B u；x 的前两维是工作空间位置 ζ(x)，其余为辅助维"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    A: np.ndarray
    B: np.ndarray

    @model_validator(mode="after")
    def _check(self) -> "Dynamics":
        A, B = self.A, self.B
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A must be square, got shape {A.shape}")
        if A.shape[0] < 2:
            raise DimensionMismatch("state dimension n must be at least 2")
        if B.ndim != 2 or B.shape[0] != A.shape[0]:
            raise DimensionMismatch(f"B must have {A.shape[0]} rows, got shape {B.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
            raise DimensionMismatch("non-finite entry in A or B")
        return self

    @classmethod
    def from_lists(cls, A, B) -> "Dynamics":
        return cls(A=np.atleast_2d(np.asarray(A, dtype=float)), B=np.atleast_2d(np.asarray(B, dtype=float)))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def step(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """支持批量：x (K, n)，u (K, m)"""
        return x @ self.A.T + u @ self.B.T


class StateBounds(BaseModel):
    """辅助维 3..n 的上下界与离散步长 ε"""
    model_config = ConfigDict(frozen=True)

    lower: tuple[float, ...] = ()
    upper: tuple[float, ...] = ()
    epsilon: float = 1.0

    @model_validator(mode="after")
    def _check(self) -> "StateBounds":
        if len(self.lower) != len(self.upper):
            raise DimensionMismatch("lower and upper bounds have different lengths")
        if self.epsilon <= 0:
            raise NonDivisibleBounds(f"epsilon must be positive, got {self.epsilon}")
        for i, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if not lo < hi:
                raise NonDivisibleBounds(f"aux dimension {i + 3}: lower {lo} is not below upper {hi}")
            ratio = (hi - lo) / self.epsilon
            if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
                raise NonDivisibleBounds(
                    f"aux dimension {i + 3}: range {hi - lo} is not a positive multiple of epsilon {self.epsilon}"
                )
        return self

    @property
    def aux_dims(self) -> int:
        return len(self.lower)

    @property
    def cells_per_dim(self) -> tuple[int, ...]:
        return tuple(int(round((hi - lo) / self.epsilon)) for lo, hi in zip(self.lower, self.upper))

    def interval(self, dim: int, k: int) -> tuple[float, float]:
        """第 dim 个辅助维第 k 个（0-based）小区间"""
        lo = self.lower[dim]
        return lo + self.epsilon * k, lo + self.epsilon * (k + 1)

    def cells_containing(self, dim: int, v: float, tol: float = TOL) -> list[int]:
        """第 dim 个辅助维上包含 v 的全部闭小区间下标（网格点上有两个，越界为空）"""
        k = math.floor((v - self.lower[dim]) / self.epsilon)
        return [j for j in (k - 1, k, k + 1)
                if 0 <= j < self.cells_per_dim[dim]
                and self.interval(dim, j)[0] - tol <= v <= self.interval(dim, j)[1] + tol]

    @property
    def full_box(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.lower, self.upper))


class AbstractState(NamedTuple):
    region: int                 # k1：细分区下标
    cell: tuple[int, ...]       # k3..kn：辅助维小区间下标


class StateCell(BaseModel):
    """{x : ζ(x) ∈ region, box_i 的闭区间约束}"""
    model_config = ConfigDict(frozen=True)

    region: ConvexPolygon
    box: tuple[tuple[float, float], ...] = ()
    region_index: int | None = None

    def contains(self, x: np.ndarray, tol: float = TOL) -> bool:
        if not self.region.contains(Point2(float(x[0]), float(x[1])), tol):
            return False
        return all(lo - tol <= x[2 + i] <= hi + tol for i, (lo, hi) in enumerate(self.box))


class TransitionSystem(BaseModel):
    """S_F = (F, δ_F)；下标 len(states) 为汇点（工作空间/状态界之外）"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    states: list[AbstractState]
    aggregates: list[list[int]]                 # 聚合状态 → 成员状态下标
    state_aggregate: list[int]                  # 状态下标 → 聚合状态下标
    transitions: dict[int, list[int]]           # 有序邻接表，含汇点
    unsafe0: list[int]
    incomplete_pairs: list[tuple[int, str]] = []    # (源状态, 目标描述)：超预算/数值失败而保留的转移
    smc_calls: int = 0

    @property
    def sink(self) -> int:
        return len(self.states)

    def successors(self, s: int) -> list[int]:
        return self.transitions.get(s, [])

    def transition_count(self) -> int:
        return sum(len(v) for v in self.transitions.values())

    def pairs(self) -> list[tuple[int, int]]:
        return [(s, t) for s in sorted(self.transitions) for t in self.transitions[s]]
