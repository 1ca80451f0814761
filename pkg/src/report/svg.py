"""src/report/svg.py — 划分与安全集的静态 SVG 渲染

使用 Agg 后端；固定 svg.hashsalt 并去掉日期元数据，保证同一输入得到逐字节相同的文件。
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Polygon as PolygonPatch  # noqa: E402

from src.geometry.types import ConvexPolygon, PartitionResult, WorkspaceSpec  # noqa: E402

_STYLE = {
    "svg.hashsalt": "lidar-nn-verify",
    "svg.fonttype": "none",
    "font.size": 8,
}

FREE_COLOR = "#dfe9f3"
OBSTACLE_COLOR = "#555555"
SAFE_COLOR = "#6fbf73"
EDGE_COLOR = "#1f3b57"


def _new_axes(workspace: WorkspaceSpec):
    fig, ax = plt.subplots(figsize=(6, 6))
    xs = [p.x for p in workspace.boundary.vertices]
    ys = [p.y for p in workspace.boundary.vertices]
    pad = 0.02 * max(max(xs) - min(xs), max(ys) - min(ys))
    ax.set_xlim(min(xs) - pad, max(xs) + pad)
    ax.set_ylim(min(ys) - pad, max(ys) + pad)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    return fig, ax


def _patch(poly: ConvexPolygon, **kwargs) -> PolygonPatch:
    return PolygonPatch(poly.to_list(), closed=True, **kwargs)


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    return path


def render_partition(partition: PartitionResult, path: str | Path, label_regions: bool = True) -> Path:
    """细分区（细线）、聚合区（粗线）与障碍物"""
    with plt.rc_context(_STYLE):
        fig, ax = _new_axes(partition.workspace)
        for i, region in enumerate(partition.fine_regions):
            obstacle = partition.region_kind[i] == "obstacle-interior"
            ax.add_patch(_patch(region, facecolor=OBSTACLE_COLOR if obstacle else FREE_COLOR,
                                edgecolor=EDGE_COLOR, linewidth=0.4))
            if label_regions:
                c = region.centroid
                ax.text(c.x, c.y, str(i), ha="center", va="center", fontsize=5,
                        color="white" if obstacle else EDGE_COLOR)
        for ring in partition.aggregate_cycles:
            xs = [p.x for p in ring] + [ring[0].x]
            ys = [p.y for p in ring] + [ring[0].y]
            ax.plot(xs, ys, color=EDGE_COLOR, linewidth=1.2)
        return _save(fig, path)


def render_safe_set(
    partition: PartitionResult,
    safe_regions: Sequence[int],
    path: str | Path,
    trajectories: Sequence[Sequence[Sequence[float]]] = (),
) -> Path:
    """安全集在工作空间上的投影（辅助维忽略），可叠加仿真轨迹"""
    safe = set(safe_regions)
    with plt.rc_context(_STYLE):
        fig, ax = _new_axes(partition.workspace)
        for i, region in enumerate(partition.fine_regions):
            if partition.region_kind[i] == "obstacle-interior":
                color = OBSTACLE_COLOR
            else:
                color = SAFE_COLOR if i in safe else FREE_COLOR
            ax.add_patch(_patch(region, facecolor=color, edgecolor=EDGE_COLOR, linewidth=0.3))
        for traj in trajectories:
            xs = [x[0] for x in traj]
            ys = [x[1] for x in traj]
            ax.plot(xs, ys, color="#c0392b", linewidth=0.6, marker=".", markersize=1.5)
        return _save(fig, path)
