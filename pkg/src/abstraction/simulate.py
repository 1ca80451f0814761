"""src/abstraction/simulate.py — 闭环轨迹仿真（端到端可靠性检查的真值）

x⁺ = A x + B f_NN(d(ζ(x)))，d 由暴力射线投射得到，与仿射成像映射无关。
"""
from __future__ import annotations

import logging
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.abstraction.fixed_point import SafeSet
from src.abstraction.types import Dynamics, StateBounds
from src.geometry.types import TOL, LidarSpec, Point2, WorkspaceSpec
from src.imaging.oracle import lidar_image_bruteforce, lidar_images_batch
from src.network.model import NeuralNetwork, controller, forward

logger = logging.getLogger(__name__)

Violation = Literal["obstacle", "boundary", "state_bounds"]
_CODES: dict[int, Violation] = {1: "obstacle", 2: "boundary", 3: "state_bounds"}


class SimulationResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    trajectory: np.ndarray                  # (已执行步数 + 1, n)
    safe: bool
    violation_step: int | None = None
    reason: Violation | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "trajectory": self.trajectory.tolist(),
            "safe": self.safe,
            "violation_step": self.violation_step,
            "reason": self.reason,
        }


class BatchSimulation(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    safe: np.ndarray                        # (K,) bool
    violation_step: np.ndarray              # (K,) int，-1 表示全程安全
    reason: list[Violation | None]
    final: np.ndarray                       # (K, n)，违规轨迹停在违规时刻

    @property
    def unsafe_count(self) -> int:
        return int((~self.safe).sum())


def _violation(x: np.ndarray, workspace: WorkspaceSpec, bounds: StateBounds | None, tol: float) -> Violation | None:
    p = Point2(float(x[0]), float(x[1]))
    if not workspace.boundary.contains_strict(p, tol):
        return "boundary"
    if workspace.in_obstacle(p, tol):
        return "obstacle"
    if bounds is not None:
        for i, (lo, hi) in enumerate(bounds.full_box):
            if not lo - tol <= x[2 + i] <= hi + tol:
                return "state_bounds"
    return None


def simulate(
    dyn: Dynamics,
    net: NeuralNetwork,
    workspace: WorkspaceSpec,
    lidar: LidarSpec,
    x0: np.ndarray,
    steps: int,
    bounds: StateBounds | None = None,
    tol: float = TOL,
) -> SimulationResult:
    """
    从 x0 迭代 steps 步；第一次违规（碰撞 / 越过 ∂W / 越出状态界）时提前停止

    越界只记录在结果里，不抛异常。
    """
    x = np.asarray(x0, dtype=float).reshape(-1)
    trajectory = [x]
    for t in range(steps + 1):
        reason = _violation(x, workspace, bounds, tol)
        if reason is not None:
            logger.debug(f"轨迹在 t={t} 违规: {reason}")
            return SimulationResult(trajectory=np.array(trajectory), safe=False, violation_step=t, reason=reason)
        if t == steps:
            break
        d = lidar_image_bruteforce(Point2(x[0], x[1]), workspace, lidar)
        u = forward(net, d).output
        x = dyn.step(x, u)
        trajectory.append(x)
    return SimulationResult(trajectory=np.array(trajectory), safe=True)


def _batch_violations(X: np.ndarray, workspace: WorkspaceSpec, bounds: StateBounds | None, tol: float) -> np.ndarray:
    """违规代码：0 无，1 障碍物，2 边界，3 状态界"""
    P = X[:, :2]
    codes = np.zeros(len(X), dtype=int)
    if bounds is not None and bounds.aux_dims:
        lo, hi = np.array(bounds.lower), np.array(bounds.upper)
        aux = X[:, 2:]
        codes[np.any((aux < lo - tol) | (aux > hi + tol), axis=1)] = 3
    for o in workspace.obstacles:
        H, g = o.halfspaces
        codes[np.all(P @ H.T <= g + tol, axis=1)] = 1
    H, g = workspace.boundary.halfspaces
    codes[np.any(P @ H.T >= g - tol, axis=1)] = 2
    return codes


def simulate_batch(
    dyn: Dynamics,
    net: NeuralNetwork,
    workspace: WorkspaceSpec,
    lidar: LidarSpec,
    X0: np.ndarray,
    steps: int,
    bounds: StateBounds | None = None,
    tol: float = TOL,
) -> BatchSimulation:
    """批量仿真：只推进仍然安全的轨迹；违规判定与 simulate 一致"""
    X = np.atleast_2d(np.asarray(X0, dtype=float)).copy()
    K = len(X)
    step_of = np.full(K, -1, dtype=int)
    code_of = np.zeros(K, dtype=int)
    alive = np.ones(K, dtype=bool)

    for t in range(steps + 1):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        codes = _batch_violations(X[idx], workspace, bounds, tol)
        hit = idx[codes > 0]
        step_of[hit] = t
        code_of[hit] = codes[codes > 0]
        alive[hit] = False
        idx = idx[codes == 0]
        if t == steps or idx.size == 0:
            continue
        d = lidar_images_batch(X[idx, :2], workspace, lidar)
        X[idx] = dyn.step(X[idx], controller(net, d))

    safe = step_of < 0
    logger.info(f"批量仿真: {K} 条轨迹 × {steps} 步, {int((~safe).sum())} 条违规")
    return BatchSimulation(
        safe=safe,
        violation_step=step_of,
        reason=[_CODES.get(int(c)) for c in code_of],
        final=X,
    )


def sample_safe_starts(safe: SafeSet, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    在 X_safe 中按体积均匀采样初始状态

    先按 面积 × 辅助维体积 选单元，再在凸多边形的扇形三角剖分里均匀取点。
    """
    if safe.is_empty:
        return np.empty((0, 2))
    weights = np.array([c.cell.region.area * np.prod([hi - lo for lo, hi in c.cell.box]) for c in safe.cells])
    picks = rng.choice(len(safe.cells), size=count, p=weights / weights.sum())
    n = 2 + len(safe.cells[0].cell.box)
    out = np.empty((count, n))
    for k, ci in enumerate(picks):
        cell = safe.cells[ci].cell
        V = np.array(cell.region.to_list())
        e1, e2 = V[1:-1] - V[0], V[2:] - V[0]
        tri = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        j = 1 + rng.choice(len(tri), p=tri / tri.sum())
        r1, r2 = rng.random(2)
        s = np.sqrt(r1)
        out[k, :2] = (1 - s) * V[0] + s * (1 - r2) * V[j] + s * r2 * V[j + 1]
        for i, (lo, hi) in enumerate(cell.box):
            out[k, 2 + i] = rng.uniform(lo, hi)
    return out
