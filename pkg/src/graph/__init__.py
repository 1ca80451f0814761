"""src/graph — 验证流水线（LangGraph StateGraph）"""
from src.graph.builder import build_pipeline
from src.graph.state import TARGET_NODE, VerifyState

__all__ = ["TARGET_NODE", "VerifyState", "build_pipeline"]
