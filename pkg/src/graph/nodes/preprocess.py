"""src/graph/nodes/preprocess.py — 预处理节点：逐个自由区域枚举可行相位并缓存冲突

verify / abstract 会复用 fingerprint 一致的缓存；preprocess 子命令总是重新计算。
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor

from src.abstraction.types import StateCell
from src.budget import SolverBudget
from src.errors import ResourceLimit
from src.geometry.types import ConvexPolygon
from src.graph.nodes.base_node import output_dir, phase_node, with_artifacts
from src.graph.state import VerifyState
from src.imaging.maps import AffineImagingMap
from src.network.io import load_network, network_to_dict
from src.network.model import NeuralNetwork
from src.smc.cache import fingerprint, load_cached_result, save_conflicts
from src.smc.solver import preprocess_region
from src.smc.types import PreprocessResult

logger = logging.getLogger(__name__)


def _run_region(
    job: tuple[int, ConvexPolygon, AffineImagingMap, NeuralNetwork, SolverBudget, str, float],
) -> tuple[int, PreprocessResult]:
    region, polygon, maps, net, budget, backend, tol = job
    cell = StateCell(region=polygon, region_index=region)
    try:
        return region, preprocess_region(cell, maps, net, budget, backend, tol)
    except ResourceLimit as e:
        # 冲突是可选输入：超预算区域按无冲突处理
        logger.warning(f"区域 {region} 预处理超预算（{e.reason}），不使用其冲突")
        return region, PreprocessResult(censored=True)


@phase_node("preprocess")
def preprocess_node(state: VerifyState) -> dict:
    config = state["config"]
    config.check_inputs("network")
    net = load_network(config.network)
    partition, maps = state["partition"], state["maps"]
    cache_dir = output_dir(state) / "conflicts"
    reuse = state.get("target") != "preprocess"

    net_key = network_to_dict(net)
    keys = {r: fingerprint(partition.fine_regions[r].to_list(), maps[r].to_list(), net_key)
            for r in partition.free_indices}

    results: dict[int, PreprocessResult] = {}
    todo = []
    for r in partition.free_indices:
        cached = load_cached_result(cache_dir, r, keys[r]) if reuse else None
        if cached is not None:
            results[r] = cached
        else:
            todo.append((r, partition.fine_regions[r], maps[r], net, config.budget(),
                         config.sat_backend, config.lp_tolerance))
    if reuse and results:
        logger.info(f"复用 {len(results)} 个区域的冲突缓存")

    if config.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            computed = list(pool.map(_run_region, todo))
    else:
        computed = [_run_region(job) for job in todo]
    for r, result in computed:
        results[r] = result
        save_conflicts(cache_dir, r, result, keys[r])

    results = dict(sorted(results.items()))
    conflicts = {r: res.conflicts for r, res in results.items() if not res.censored}
    total = sum(len(c) for c in conflicts.values())
    logger.info(f"预处理完成: {len(results)} 个区域, {total} 个冲突, "
                f"{sum(res.censored for res in results.values())} 个超预算")
    return {
        "network": net,
        "preprocess": results,
        "conflicts": conflicts,
        "artifacts": with_artifacts(state, conflicts=cache_dir),
        "log": {"conflicts": total, "reused": len(results) - len(computed)},
    }
