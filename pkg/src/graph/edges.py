"""src/graph/edges.py — 条件路由函数"""
import logging

from src.graph.state import TARGET_NODE, VerifyState

logger = logging.getLogger(__name__)

# 流水线顺序
PIPELINE = ["partition", "preprocess", "abstract", "fixed_point", "report"]


def route_after(node: str):
    """生成 node 之后的路由函数

    路由规则（按优先级）：
    1. 节点失败（phase == failed）→ stop
    2. node 是当前子命令的目标节点 → stop
    3. 默认 → next
    """

    def route(state: VerifyState) -> str:
        if state.get("phase") == "failed":
            return "stop"
        target = TARGET_NODE.get(state.get("target", "verify"), "report")
        if node == target:
            logger.debug(f"到达目标节点 {node}，流水线结束")
            return "stop"
        return "next"

    route.__name__ = f"route_after_{node}"
    return route
