"""src/report — 报告、SVG 渲染与规模基准"""
from src.report.bench import BenchSweep, run_bench
from src.report.report import VerificationReport, build_report, render_text, save_report
from src.report.svg import render_partition, render_safe_set

__all__ = [
    "BenchSweep",
    "VerificationReport",
    "build_report",
    "render_partition",
    "render_safe_set",
    "render_text",
    "run_bench",
    "save_report",
]
