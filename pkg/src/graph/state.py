"""src/graph/state.py — 验证流水线的全局状态（兼容 LangGraph 1.0）"""
from __future__ import annotations

import operator
from typing import Annotated, Any, Literal

from typing_extensions import TypedDict

from src.abstraction.fixed_point import FixedPoint, SafeSet
from src.abstraction.states import StateSpace
from src.abstraction.types import Dynamics, StateBounds, TransitionSystem
from src.geometry.types import LidarSpec, PartitionResult, WorkspaceSpec
from src.imaging.maps import AffineImagingMap
from src.network.model import NeuralNetwork
from src.smc.types import Conflict, PreprocessResult
from src.utils.config import RunConfig

Phase = Literal["init", "partition", "preprocess", "abstract", "fixed_point", "report", "complete", "failed"]
Target = Literal["partition", "preprocess", "abstract", "verify"]

# 子命令 → 需要执行到的最后一个节点
TARGET_NODE: dict[str, str] = {
    "partition": "partition",
    "preprocess": "preprocess",
    "abstract": "abstract",
    "verify": "report",
}


class VerifyState(TypedDict, total=False):
    """LangGraph StateGraph 的核心状态"""
    # 输入
    config: RunConfig
    target: Target

    # 划分
    workspace: WorkspaceSpec
    lidar: LidarSpec
    partition: PartitionResult
    maps: dict[int, AffineImagingMap]

    # 预处理
    network: NeuralNetwork
    preprocess: dict[int, PreprocessResult]
    conflicts: dict[int, list[Conflict]]

    # 抽象与验证
    dynamics: Dynamics
    bounds: StateBounds
    space: StateSpace
    transitions: TransitionSystem
    fixed_point: FixedPoint
    safe: SafeSet

    # 执行追踪
    execution_log: Annotated[list[dict], operator.add]
    artifacts: dict[str, str]

    # 流程控制
    phase: Phase
    error: str | None
    error_type: str | None
    exit_code: int
    report: Any
