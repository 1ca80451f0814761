"""src/graph/builder.py — 构建验证流水线的 LangGraph StateGraph"""
import logging

from langgraph.graph import END, START, StateGraph

from src.graph.edges import PIPELINE, route_after
from src.graph.nodes import (
    abstract_node,
    fixed_point_node,
    partition_node,
    preprocess_node,
    report_node,
)
from src.graph.state import VerifyState

logger = logging.getLogger(__name__)

_NODES = {
    "partition": partition_node,
    "preprocess": preprocess_node,
    "abstract": abstract_node,
    "fixed_point": fixed_point_node,
    "report": report_node,
}


def build_pipeline():
    """
    构建并编译 partition → preprocess → abstract → fixed_point → report

    每个节点之后的条件边在出错或到达子命令目标时转到 END。
    状态里保存 numpy 数组与 pydantic 模型，不使用 checkpointer。
    """
    g = StateGraph(VerifyState)

    # ── 注册节点 ──
    for name in PIPELINE:
        g.add_node(name, _NODES[name])

    # ── 入口 ──
    g.add_edge(START, PIPELINE[0])

    # ── 条件路由 ──
    for node, nxt in zip(PIPELINE, PIPELINE[1:]):
        g.add_conditional_edges(node, route_after(node), {"next": nxt, "stop": END})
    g.add_edge(PIPELINE[-1], END)

    # ── 编译 ──
    return g.compile()
