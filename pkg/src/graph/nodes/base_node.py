"""src/graph/nodes/base_node.py — 阶段节点的公共包装

每个阶段本身是同步的计算函数；包装后在线程中执行，计时并写 execution_log
（phase_start 与 phase_done / phase_failed 成对），VerificationError 转为 error / exit_code 状态而不是向外抛出。
"""
from __future__ import annotations

import asyncio
import functools
import logging
import time
from pathlib import Path
from typing import Any, Awaitable, Callable

from src.errors import InputError, VerificationError
from src.graph.state import VerifyState

logger = logging.getLogger(__name__)

PhaseFn = Callable[[VerifyState], dict[str, Any]]
NodeFn = Callable[[VerifyState], Awaitable[dict[str, Any]]]


def phase_node(phase: str) -> Callable[[PhaseFn], NodeFn]:
    """把同步阶段函数包装成异步 LangGraph 节点；返回值里的 "log" 合并进执行日志"""

    def wrap(fn: PhaseFn) -> NodeFn:
        @functools.wraps(fn)
        async def node(state: VerifyState) -> dict[str, Any]:
            started = time.perf_counter()
            begin = {"event": "phase_start", "phase": phase, "at": time.time()}
            logger.info(f"── 阶段开始: {phase} ──")
            try:
                update = await asyncio.to_thread(fn, state)
            except VerificationError as e:
                seconds = time.perf_counter() - started
                logger.error(f"阶段 {phase} 失败: {type(e).__name__}: {e}")
                return {
                    "phase": "failed",
                    "error": str(e),
                    "error_type": type(e).__name__,
                    "exit_code": 2 if isinstance(e, InputError) else 1,
                    "execution_log": [begin, {
                        "event": "phase_failed",
                        "phase": phase,
                        "seconds": seconds,
                        "error": str(e),
                    }],
                }
            seconds = time.perf_counter() - started
            extra = update.pop("log", {})
            logger.info(f"── 阶段完成: {phase}，耗时 {seconds:.3f}s ──")
            return {
                **update,
                "phase": phase,
                "execution_log": [begin, {"event": "phase_done", "phase": phase, "seconds": seconds, **extra}],
            }

        return node

    return wrap


def output_dir(state: VerifyState) -> Path:
    path = Path(state["config"].output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def with_artifacts(state: VerifyState, **paths: Path) -> dict[str, str]:
    """artifacts 通道是整体覆盖的，因此每次都基于已有内容合并"""
    return {**(state.get("artifacts") or {}), **{k: str(v) for k, v in paths.items()}}
