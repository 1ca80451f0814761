"""src/abstraction/states.py — 状态空间划分 F 与聚合状态 F′"""
from __future__ import annotations

import itertools
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict
from shapely.geometry import Polygon as ShapelyPolygon

from src.abstraction.types import AbstractState, StateBounds, StateCell
from src.geometry.predicates import collinear_overlap
from src.geometry.types import TOL, PartitionResult, Point2

logger = logging.getLogger(__name__)


class StateSpace(BaseModel):
    """F（区域 × 辅助维小区间）、F′（按聚合区分组）与状态 → 单元的双射"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    partition: PartitionResult
    bounds: StateBounds
    states: tuple[AbstractState, ...]
    aggregates: tuple[tuple[int, ...], ...]
    state_aggregate: tuple[int, ...]

    def index(self, state: AbstractState) -> int:
        cells = self.bounds.cells_per_dim
        offset = 0
        for k, size in zip(state.cell, cells):
            offset = offset * size + k
        return state.region * int(np.prod(cells, dtype=int)) + offset

    def cell(self, s: int) -> StateCell:
        state = self.states[s]
        box = tuple(self.bounds.interval(dim, k) for dim, k in enumerate(state.cell))
        return StateCell(region=self.partition.fine_regions[state.region], box=box, region_index=state.region)

    def aggregate_cell(self, a: int) -> StateCell:
        """聚合区凸包 × 完整辅助维区间（成员单元的上近似）"""
        return StateCell(region=self.partition.aggregate_regions[a], box=self.bounds.full_box)

    def region_kind(self, s: int) -> str:
        return self.partition.region_kind[self.states[s].region]

    def states_containing(self, x: np.ndarray, tol: float = TOL) -> list[int]:
        """包含 x 的全部状态（闭单元，边界上的点可能属于多个状态）"""
        p = Point2(float(x[0]), float(x[1]))
        regions = [i for i, r in enumerate(self.partition.fine_regions) if r.contains(p, tol)]
        per_dim = [self.bounds.cells_containing(dim, float(x[2 + dim]), tol) for dim in range(self.bounds.aux_dims)]
        return sorted(
            self.index(AbstractState(r, tuple(ks)))
            for r in regions
            for ks in itertools.product(*per_dim)
        )


def build_states(partition: PartitionResult, bounds: StateBounds) -> StateSpace:
    """
    F = {(k1, k3, …, kn)}，按区域优先、辅助维下标字典序编号

    |F| = 细分区数 × Π_i (x̄_i − x̲_i)/ε；障碍物内部区域也有状态（初始即不安全）。
    """
    aux = [range(c) for c in bounds.cells_per_dim]
    states = tuple(
        AbstractState(r, tuple(ks))
        for r in range(len(partition.fine_regions))
        for ks in itertools.product(*aux)
    )
    state_aggregate = tuple(partition.fine_to_aggregate[s.region] for s in states)
    aggregates = tuple(
        tuple(i for i, a in enumerate(state_aggregate) if a == agg)
        for agg in range(len(partition.aggregate_regions))
    )
    logger.info(f"状态空间: |F|={len(states)}, |F′|={len(aggregates)}")
    return StateSpace(
        partition=partition,
        bounds=bounds,
        states=states,
        aggregates=aggregates,
        state_aggregate=state_aggregate,
    )


def unsafe_regions(partition: PartitionResult, strict_closed: bool = False, tol: float = TOL) -> list[int]:
    """
    初始不安全的细分区下标

    默认：障碍物内部区域 + 有一条边与 ∂W 正长度重合的区域；
    strict_closed：任何在 tol 内触碰 O*（∂W 或障碍物）的区域。
    """
    workspace = partition.workspace
    boundary_edges = workspace.boundary.edges()
    outer = ShapelyPolygon(workspace.boundary.to_list()).exterior
    obstacles = [ShapelyPolygon(o.to_list()) for o in workspace.obstacles]

    unsafe = []
    for i, region in enumerate(partition.fine_regions):
        if partition.region_kind[i] == "obstacle-interior":
            unsafe.append(i)
            continue
        if strict_closed:
            shape = ShapelyPolygon(region.to_list())
            touches = outer.distance(shape) <= tol or any(o.distance(shape) <= tol for o in obstacles)
        else:
            touches = any(collinear_overlap(e, b, tol) > tol for e in region.edges() for b in boundary_edges)
        if touches:
            unsafe.append(i)
    return unsafe


def initial_unsafe(space: StateSpace, strict_closed: bool = False, tol: float = TOL) -> list[int]:
    """F⁰：不安全区域上的全部状态（不含汇点）"""
    regions = set(unsafe_regions(space.partition, strict_closed, tol))
    unsafe = [s for s, state in enumerate(space.states) if state.region in regions]
    logger.info(f"初始不安全状态: {len(unsafe)} / {len(space.states)} (strict_closed={strict_closed})")
    return unsafe
