"""src/report/bench.py — 规模基准：划分随激光数/障碍物顶点数、预处理随网络结构、预载冲突对转移检查的加速

每个点都有时间上限；超出的点写为 censored=1。
"""
from __future__ import annotations

import csv
import logging
import math
import multiprocessing
import time
from pathlib import Path
from typing import Any, Callable

import numpy as np
from pydantic import BaseModel, Field

from src.abstraction.types import Dynamics, StateCell
from src.budget import create_budget
from src.errors import ResourceLimit
from src.geometry.partition import wksp_partition
from src.geometry.types import ConvexPolygon, LidarSpec, PartitionResult, WorkspaceSpec
from src.imaging.maps import region_imaging_maps
from src.network.model import NeuralNetwork
from src.smc.encoding import encode_region, encode_transition
from src.smc.solver import preprocess_problem, smc_solve
from src.utils.jsonio import FORMAT_VERSION

logger = logging.getLogger(__name__)

PARTITION_COLUMNS = ["vertices", "lasers", "regions", "free_regions", "seconds", "censored"]
PREPROCESS_COLUMNS = ["architecture", "relus", "feasible_phases", "conflicts", "lp_calls", "seconds", "censored"]
TRANSITION_COLUMNS = [
    "source", "target", "relus", "preloaded_conflicts", "status_without", "status_with", "status_match",
    "lp_calls_without", "lp_calls_with", "without_conflicts_s", "with_conflicts_s", "speedup", "censored",
]


class BenchSweep(BaseModel):
    """一次基准扫描的参数"""
    lasers: list[int] = Field(default_factory=lambda: [8, 16, 38])
    obstacle_vertices: list[int] = Field(default_factory=lambda: [4, 8])
    hidden: list[list[int]] = Field(default_factory=lambda: [[4], [8], [4, 4]])
    preprocess_lasers: int = 8
    # 转移检查基准：两层隐层、至少 20 个 ReLU
    transition_hidden: list[int] = Field(default_factory=lambda: [10, 10])
    transition_targets: int = Field(default=4, ge=1)
    transition_gain: float = 0.01
    heading: float = 0.1
    size: float = 10.0
    radius: float = 2.0
    time_limit_s: float = 60.0
    seed: int = 0


def regular_obstacle_workspace(vertices: int, size: float = 10.0, radius: float = 2.0) -> WorkspaceSpec:
    """正方形边界 [0, size]² + 居中的正 k 边形障碍物"""
    boundary = ConvexPolygon.from_points([(0, 0), (size, 0), (size, size), (0, size)])
    c = size / 2
    obstacle = ConvexPolygon.from_points([
        (c + radius * math.cos(2 * math.pi * k / vertices + 0.05),
         c + radius * math.sin(2 * math.pi * k / vertices + 0.05))
        for k in range(vertices)
    ])
    return WorkspaceSpec(boundary=boundary, obstacles=(obstacle,))


def random_network(input_dim: int, hidden: list[int], output_dim: int, rng: np.random.Generator) -> NeuralNetwork:
    """He 初始化的随机 ReLU 网络"""
    sizes = [input_dim, *hidden, output_dim]
    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        W = rng.normal(0.0, math.sqrt(2.0 / fan_in), size=(fan_out, fan_in))
        w = rng.normal(0.0, 0.1, size=fan_out)
        layers.append((W, w))
    return NeuralNetwork.from_layers(layers, input_dim=input_dim, output_dim=output_dim)


def run_with_timeout(fn: Callable[..., Any], args: tuple, timeout_s: float) -> Any | None:
    """在单独的子进程中运行 fn(*args)；超过 timeout_s 时终止子进程并返回 None"""
    pool = multiprocessing.Pool(processes=1)
    try:
        return pool.apply_async(fn, args).get(timeout_s)
    except multiprocessing.TimeoutError:
        return None
    finally:
        pool.terminate()
        pool.join()


def _partition_point(workspace: WorkspaceSpec, lidar: LidarSpec) -> tuple[int, int, float]:
    started = time.perf_counter()
    partition = wksp_partition(workspace, lidar)
    return len(partition.fine_regions), len(partition.free_indices), time.perf_counter() - started


def bench_partition(sweep: BenchSweep) -> list[dict[str, Any]]:
    rows = []
    for k in sweep.obstacle_vertices:
        workspace = regular_obstacle_workspace(k, sweep.size, sweep.radius)
        for n in sweep.lasers:
            lidar = LidarSpec(laser_count=n, heading=sweep.heading)
            point = run_with_timeout(_partition_point, (workspace, lidar), sweep.time_limit_s)
            if point is None:
                rows.append({"vertices": k, "lasers": n, "regions": "", "free_regions": "",
                             "seconds": sweep.time_limit_s, "censored": 1})
                logger.warning(f"划分基准超时: 顶点={k}, 激光={n}, 上限 {sweep.time_limit_s}s")
                continue
            regions, free, seconds = point
            rows.append({
                "vertices": k,
                "lasers": n,
                "regions": regions,
                "free_regions": free,
                "seconds": round(seconds, 6),
                "censored": 0,
            })
            logger.info(f"划分基准: 顶点={k}, 激光={n}, 区域={regions}, {seconds:.3f}s")
    return rows


def _bench_region(partition: PartitionResult) -> int:
    """面积最大的自由区域"""
    return max(partition.free_indices, key=lambda i: partition.fine_regions[i].area)


def bench_preprocess(sweep: BenchSweep) -> list[dict[str, Any]]:
    rng = np.random.default_rng(sweep.seed)
    workspace = regular_obstacle_workspace(min(sweep.obstacle_vertices), sweep.size, sweep.radius)
    lidar = LidarSpec(laser_count=sweep.preprocess_lasers, heading=sweep.heading)
    partition = wksp_partition(workspace, lidar)
    r = _bench_region(partition)
    region = partition.fine_regions[r]
    maps = region_imaging_maps(region, lidar, workspace)

    cell = StateCell(region=region, region_index=r)
    rows = []
    for hidden in sweep.hidden:
        net = random_network(2 * lidar.laser_count, hidden, 2, rng)
        row: dict[str, Any] = {"architecture": "x".join(map(str, hidden)), "relus": net.relu_count}
        try:
            result = preprocess_problem(encode_region(cell, maps, net), create_budget(sweep.time_limit_s, 10**9))
        except ResourceLimit:
            rows.append({**row, "feasible_phases": "", "conflicts": "", "lp_calls": "", "seconds": "",
                         "censored": 1})
            logger.warning(f"预处理基准超时: {row['architecture']}")
            continue
        rows.append({
            **row,
            "feasible_phases": len(result.feasible_phases),
            "conflicts": len(result.conflicts),
            "lp_calls": result.lp_calls,
            "seconds": round(result.seconds, 6),
            "censored": 0,
        })
        logger.info(f"预处理基准: {row['architecture']}, 冲突={len(result.conflicts)}, {result.seconds:.3f}s")
    return rows


def _timed_solve(problem, time_limit_s: float):
    started = time.perf_counter()
    outcome = smc_solve(problem, create_budget(time_limit_s, 10**9))
    return outcome, time.perf_counter() - started


def bench_transition(sweep: BenchSweep) -> list[dict[str, Any]]:
    """
    固定源区域（面积最大的自由区）到离它最近的若干个自由区的转移检查，
    分别不预载和预载源区域的预处理冲突，比较状态、LP 调用次数与耗时
    """
    rng = np.random.default_rng(sweep.seed)
    workspace = regular_obstacle_workspace(min(sweep.obstacle_vertices), sweep.size, sweep.radius)
    lidar = LidarSpec(laser_count=sweep.preprocess_lasers, heading=sweep.heading)
    partition = wksp_partition(workspace, lidar)
    r = _bench_region(partition)
    source = StateCell(region=partition.fine_regions[r], region_index=r)
    maps = region_imaging_maps(source.region, lidar, workspace)
    net = random_network(2 * lidar.laser_count, sweep.transition_hidden, 2, rng)
    dyn = Dynamics.from_lists(np.eye(2), sweep.transition_gain * np.eye(2))

    center = source.region.centroid
    targets = sorted(partition.free_indices,
                     key=lambda i: math.dist(partition.fine_regions[i].centroid, center))[:sweep.transition_targets]

    try:
        pre = preprocess_problem(encode_region(source, maps, net), create_budget(sweep.time_limit_s, 10**9))
    except ResourceLimit:
        logger.warning(f"转移基准: 源区域 {r} 预处理超时")
        return [{"source": r, "target": t, "relus": net.relu_count, "censored": 1} for t in targets]
    clauses = [c.clause for c in pre.conflicts]

    rows = []
    for t in targets:
        target = StateCell(region=partition.fine_regions[t], region_index=t)
        problem = encode_transition(dyn, source, target, maps, net)
        row: dict[str, Any] = {"source": r, "target": t, "relus": net.relu_count,
                               "preloaded_conflicts": len(clauses)}
        try:
            plain, without = _timed_solve(problem, sweep.time_limit_s)
            primed, with_conflicts = _timed_solve(problem.with_clauses(clauses), sweep.time_limit_s)
        except ResourceLimit:
            rows.append({**row, "censored": 1})
            logger.warning(f"转移基准超时: {r} → {t}")
            continue
        rows.append({
            **row,
            "status_without": plain.status,
            "status_with": primed.status,
            "status_match": int(plain.status == primed.status),
            "lp_calls_without": plain.lp_calls,
            "lp_calls_with": primed.lp_calls,
            "without_conflicts_s": round(without, 6),
            "with_conflicts_s": round(with_conflicts, 6),
            "speedup": round(without / with_conflicts, 3) if with_conflicts > 0 else "",
            "censored": 0,
        })
        logger.info(f"转移基准: {r} → {t} {plain.status}, LP {plain.lp_calls} → {primed.lp_calls}, "
                    f"{without:.3f}s → {with_conflicts:.3f}s")
    return rows


def write_csv(rows: list[dict[str, Any]], columns: list[str], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=["format_version", *columns], restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow({"format_version": FORMAT_VERSION, **row})
    return path


def run_bench(sweep: BenchSweep, output_dir: str | Path) -> tuple[Path, Path, Path]:
    output_dir = Path(output_dir)
    part = write_csv(bench_partition(sweep), PARTITION_COLUMNS, output_dir / "bench_partition.csv")
    pre = write_csv(bench_preprocess(sweep), PREPROCESS_COLUMNS, output_dir / "bench_preprocess.csv")
    trans = write_csv(bench_transition(sweep), TRANSITION_COLUMNS, output_dir / "bench_transition.csv")
    return part, pre, trans
