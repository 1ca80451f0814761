"""src/abstraction/transitions.py — 转移关系 δ_F 的计算（聚合剪枝 + 逐对细化）

δ_F 初始为完全图（含汇点），随后对每个源状态逐个删除 SMC 证明为 UNSAT 的转移。
超预算 / 数值失败的检查保留转移并记为 incomplete。
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.abstraction.states import StateSpace, initial_unsafe
from src.abstraction.types import Dynamics, StateCell, TransitionSystem
from src.budget import SolverBudget
from src.errors import NumericalFailure, ResourceLimit
from src.imaging.maps import AffineImagingMap
from src.network.model import NeuralNetwork
from src.smc.encoding import TargetConstraint, encode_transition
from src.smc.lp import LP_TOL
from src.smc.solver import DEFAULT_BACKEND, smc_solve
from src.smc.types import Conflict

logger = logging.getLogger(__name__)

CheckStatus = Literal["SAT", "UNSAT", "INCOMPLETE"]


class TransitionOptions(BaseModel):
    """转移计算的开关与求解预算"""
    refine_intra: bool = False
    skip_unsafe_sources: bool = True
    backend: str = DEFAULT_BACKEND
    tol: float = LP_TOL
    budget: SolverBudget | None = None
    workers: int = 1


class _Context(BaseModel):
    """单个源状态细化所需的全部只读输入（进程池中按值传递）"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    space: StateSpace
    dyn: Dynamics
    net: NeuralNetwork
    maps: dict[int, AffineImagingMap]
    clauses: dict[int, list[tuple[int, ...]]]
    options: TransitionOptions


class _SourceResult(BaseModel):
    source: int
    successors: list[int]
    incomplete: list[tuple[int, str]] = []
    smc_calls: int = 0


def sink_constraints(space: StateSpace, n: int) -> list[tuple[str, TargetConstraint]]:
    """x′ 离开工作空间（越过某条边界边，闭）或越过某个辅助维界（闭）"""
    out: list[tuple[str, TargetConstraint]] = []
    H, g = space.partition.workspace.boundary.halfspaces
    for i in range(H.shape[0]):
        coef = np.zeros(n)
        coef[:2] = H[i]
        out.append((f"boundary{i}", (coef, ">=", float(g[i]))))
    for dim, (lo, hi) in enumerate(space.bounds.full_box):
        coef = np.zeros(n)
        coef[2 + dim] = 1.0
        out.append((f"aux{dim}:lower", (coef, "<=", float(lo))))
        out.append((f"aux{dim}:upper", (coef.copy(), ">=", float(hi))))
    return out


class _Refiner:
    """对一个源状态执行全部 SMC 检查"""

    def __init__(self, ctx: _Context, source: int):
        self.ctx = ctx
        self.source = source
        state = ctx.space.states[source]
        self.from_cell = ctx.space.cell(source)
        self.maps = ctx.maps[state.region]
        self.clauses = ctx.clauses.get(state.region, [])
        self.calls = 0
        self.incomplete: list[tuple[int, str]] = []

    def check(self, to_cell: StateCell | None, label: str,
              extra: Sequence[TargetConstraint] = ()) -> CheckStatus:
        ctx = self.ctx
        problem = encode_transition(ctx.dyn, self.from_cell, to_cell, self.maps, ctx.net, extra)
        problem = problem.with_clauses(self.clauses)
        self.calls += 1
        try:
            outcome = smc_solve(problem, ctx.options.budget, ctx.options.backend, ctx.options.tol)
        except (ResourceLimit, NumericalFailure) as exc:
            logger.warning(f"转移检查未完成，保留转移: 源 {self.source} → {label}: {exc}")
            self.incomplete.append((self.source, label))
            return "INCOMPLETE"
        logger.debug(f"转移检查: {self.source} → {label}: {outcome.status} ({outcome.lp_calls} 次 LP)")
        return outcome.status

    def run(self) -> _SourceResult:
        space = self.ctx.space
        own = space.state_aggregate[self.source]
        removed: set[int] = set()

        for a, members in enumerate(space.aggregates):
            if a == own:
                continue
            status = self.check(space.aggregate_cell(a), f"aggregate{a}")
            if status == "UNSAT":
                removed.update(members)
            elif status == "SAT":
                for t in members:
                    if self.check(space.cell(t), f"state{t}") == "UNSAT":
                        removed.add(t)

        if self.ctx.options.refine_intra:
            for t in space.aggregates[own]:
                if self.check(space.cell(t), f"state{t}") == "UNSAT":
                    removed.add(t)

        sink = len(space.states)
        reaches_sink = False
        for label, constraint in sink_constraints(space, self.ctx.dyn.n):
            if self.check(None, f"sink:{label}", [constraint]) != "UNSAT":
                reaches_sink = True
                break

        successors = [t for t in range(len(space.states)) if t not in removed]
        if reaches_sink:
            successors.append(sink)
        return _SourceResult(source=self.source, successors=successors,
                             incomplete=self.incomplete, smc_calls=self.calls)


def _refine_source(ctx: _Context, source: int) -> _SourceResult:
    return _Refiner(ctx, source).run()


def compute_transitions(
    space: StateSpace,
    dyn: Dynamics,
    net: NeuralNetwork,
    maps: dict[int, AffineImagingMap],
    conflicts: dict[int, list[Conflict]] | None = None,
    unsafe0: Sequence[int] | None = None,
    options: TransitionOptions | None = None,
) -> TransitionSystem:
    """
    计算 δ_F

    对每个源状态 s 与每个不含 s 的聚合状态 s′ 做一次 SMC 检查：UNSAT 时删除 s → s′ 的全部成员，
    SAT 时逐个检查成员。聚合内部的转移只在 refine_intra 时细化。
    预处理冲突作为学习子句预先加入每个检查（对同一源区域都有效）。

    Args:
        conflicts: 区域下标 → 冲突列表，可为空
        unsafe0: F⁰（不含汇点）；None 时按默认边界规则计算
    """
    options = options or TransitionOptions()
    if unsafe0 is None:
        unsafe0 = initial_unsafe(space)
    unsafe_set = set(unsafe0)
    sink = len(space.states)
    complete = list(range(sink + 1))

    sources = [
        s for s, state in enumerate(space.states)
        if space.partition.region_kind[state.region] == "free"
        and not (options.skip_unsafe_sources and s in unsafe_set)
    ]
    ctx = _Context(
        space=space,
        dyn=dyn,
        net=net,
        maps=maps,
        clauses={r: [c.clause for c in cs] for r, cs in (conflicts or {}).items()},
        options=options,
    )

    started = time.perf_counter()
    logger.info(f"开始计算转移: {len(sources)} 个源状态, {len(space.aggregates)} 个聚合状态, "
                f"workers={options.workers}")
    if options.workers > 1 and len(sources) > 1:
        with ProcessPoolExecutor(max_workers=options.workers) as pool:
            results = list(pool.map(partial(_refine_source, ctx), sources,
                                    chunksize=max(1, len(sources) // (4 * options.workers))))
    else:
        results = [_refine_source(ctx, s) for s in sources]

    transitions: dict[int, list[int]] = {s: complete for s in range(sink)}
    transitions[sink] = [sink]
    incomplete: list[tuple[int, str]] = []
    smc_calls = 0
    for r in results:
        transitions[r.source] = r.successors
        incomplete.extend(r.incomplete)
        smc_calls += r.smc_calls

    ts = TransitionSystem(
        states=list(space.states),
        aggregates=[list(m) for m in space.aggregates],
        state_aggregate=list(space.state_aggregate),
        transitions=transitions,
        unsafe0=sorted(unsafe_set | {sink}),
        incomplete_pairs=incomplete,
        smc_calls=smc_calls,
    )
    logger.info(f"转移计算完成: |δ_F|={ts.transition_count()}, {smc_calls} 次 SMC, "
                f"{len(incomplete)} 个未完成, 耗时 {time.perf_counter() - started:.3f}s")
    return ts
