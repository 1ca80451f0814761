"""src/report/report.py — 验证报告（JSON + 终端表格）

报告中的每个计数都可以从同一次运行写出的 JSON 产物重新推导。
"""
from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field
from rich.console import Console
from rich.table import Table

from src.utils.jsonio import FORMAT_VERSION, dump_json


class RegionConflicts(BaseModel):
    region: int
    feasible_phases: int
    conflicts: int
    lp_calls: int
    censored: bool = False


class VerificationReport(BaseModel):
    """对应一次 verify 运行的全部统计"""
    format_version: int = FORMAT_VERSION

    # 划分
    fine_regions: int = 0
    free_regions: int = 0
    aggregate_regions: int = 0
    laser_count: int = 0

    # 预处理
    regions: list[RegionConflicts] = []

    # 抽象
    states: int = 0
    aggregates: int = 0
    transitions: int = 0
    smc_calls: int = 0
    unsafe_initial: int = 0
    incomplete_pairs: int = 0

    # 不动点
    safe_states: int = 0
    unsafe_states: int = 0
    safe_volume: float = 0.0

    phase_seconds: dict[str, float] = Field(default_factory=dict)
    artifacts: dict[str, str] = Field(default_factory=dict)

    @property
    def total_conflicts(self) -> int:
        return sum(r.conflicts for r in self.regions)

    @property
    def complete(self) -> bool:
        """没有任何因超预算 / 数值失败而保留的转移"""
        return self.incomplete_pairs == 0


def build_report(state: dict[str, Any]) -> VerificationReport:
    """从流水线状态汇总报告；缺失的阶段对应字段保持为 0"""
    report = VerificationReport()
    update: dict[str, Any] = {}

    partition = state.get("partition")
    if partition is not None:
        update.update(
            fine_regions=len(partition.fine_regions),
            free_regions=len(partition.free_indices),
            aggregate_regions=len(partition.aggregate_regions),
        )
    lidar = state.get("lidar")
    if lidar is not None:
        update["laser_count"] = lidar.laser_count

    pre = state.get("preprocess") or {}
    update["regions"] = [
        RegionConflicts(region=r, feasible_phases=len(res.feasible_phases), conflicts=len(res.conflicts),
                        lp_calls=res.lp_calls, censored=res.censored)
        for r, res in sorted(pre.items())
    ]

    ts = state.get("transitions")
    if ts is not None:
        update.update(
            states=len(ts.states),
            aggregates=len(ts.aggregates),
            transitions=ts.transition_count(),
            smc_calls=ts.smc_calls,
            unsafe_initial=len([s for s in ts.unsafe0 if s != ts.sink]),
            incomplete_pairs=len(ts.incomplete_pairs),
        )
    fp = state.get("fixed_point")
    if fp is not None:
        update.update(safe_states=len(fp.safe), unsafe_states=len(fp.unsafe))
    safe = state.get("safe")
    if safe is not None:
        update["safe_volume"] = safe.volume

    seconds: dict[str, float] = {}
    for entry in state.get("execution_log", []):
        if entry.get("event") == "phase_done":
            seconds[entry["phase"]] = seconds.get(entry["phase"], 0.0) + float(entry["seconds"])
    update["phase_seconds"] = seconds
    update["artifacts"] = dict(state.get("artifacts") or {})
    return report.model_copy(update=update)


def render_text(report: VerificationReport, width: int = 100) -> str:
    """终端可读的汇总表"""
    console = Console(record=True, width=width, force_terminal=False, color_system=None)

    summary = Table(title="验证结果", show_header=True)
    summary.add_column("项目")
    summary.add_column("数值", justify="right")
    rows = [
        ("细分区 / 自由区 / 聚合区", f"{report.fine_regions} / {report.free_regions} / {report.aggregate_regions}"),
        ("激光数", str(report.laser_count)),
        ("状态 |F| / 聚合 |F′|", f"{report.states} / {report.aggregates}"),
        ("转移 |δ_F|", str(report.transitions)),
        ("SMC 调用", str(report.smc_calls)),
        ("冲突总数", str(report.total_conflicts)),
        ("初始不安全 |F⁰|", str(report.unsafe_initial)),
        ("|F_safe| / |F_unsafe|", f"{report.safe_states} / {report.unsafe_states}"),
        ("安全集体积", f"{report.safe_volume:.6g}"),
        ("未完成检查", str(report.incomplete_pairs)),
    ]
    for name, value in rows:
        summary.add_row(name, value)
    console.print(summary)

    if report.phase_seconds:
        timing = Table(title="阶段耗时", show_header=True)
        timing.add_column("阶段")
        timing.add_column("秒", justify="right")
        for phase, sec in report.phase_seconds.items():
            timing.add_row(phase, f"{sec:.3f}")
        console.print(timing)

    if report.regions:
        regions = Table(title="区域预处理", show_header=True)
        for col in ("区域", "可行相位", "冲突", "LP 次数", "超预算"):
            regions.add_column(col, justify="right")
        for r in report.regions:
            regions.add_row(str(r.region), str(r.feasible_phases), str(r.conflicts), str(r.lp_calls),
                            "是" if r.censored else "")
        console.print(regions)
    return console.export_text()


def save_report(report: VerificationReport, directory: str | Path) -> tuple[Path, Path]:
    directory = Path(directory)
    json_path = dump_json(directory / "report.json", report.model_dump(mode="json"), versioned=False)
    text_path = directory / "report.txt"
    text_path.write_text(render_text(report), encoding="utf-8")
    return json_path, text_path
