"""src/graph/nodes/report.py — 报告节点：汇总计数与阶段耗时"""
from __future__ import annotations

import logging

from src.graph.nodes.base_node import output_dir, phase_node, with_artifacts
from src.graph.state import VerifyState
from src.report.report import build_report, save_report

logger = logging.getLogger(__name__)


@phase_node("report")
def report_node(state: VerifyState) -> dict:
    out = output_dir(state)
    artifacts = with_artifacts(state, report=out / "report.json", report_text=out / "report.txt")
    report = build_report({**state, "artifacts": artifacts})
    save_report(report, out)
    if not report.complete:
        logger.warning(f"验证不完整: {report.incomplete_pairs} 个检查超预算或数值失败，相关转移已保守保留")
    return {
        "report": report,
        "artifacts": artifacts,
        "exit_code": 0 if report.complete else 1,
    }
