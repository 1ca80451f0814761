"""src/graph/nodes/partition.py — 划分节点：读取工作空间，计算 W* / W′ 与各区域成像映射"""
from __future__ import annotations

import logging

from src.geometry.io import load_workspace, partition_to_dict
from src.geometry.partition import wksp_partition
from src.graph.nodes.base_node import output_dir, phase_node, with_artifacts
from src.graph.state import VerifyState
from src.imaging.maps import partition_imaging_maps
from src.report.svg import render_partition
from src.utils.jsonio import dump_json

logger = logging.getLogger(__name__)


@phase_node("partition")
def partition_node(state: VerifyState) -> dict:
    config = state["config"]
    config.check_inputs("workspace")
    workspace = load_workspace(config.workspace)
    lidar = config.lidar()

    partition = wksp_partition(workspace, lidar, config.include_boundary_vertices, config.geometry_tolerance)
    maps = partition_imaging_maps(partition, lidar)

    out = output_dir(state)
    json_path = dump_json(out / "partition.json",
                          partition_to_dict(partition, {r: m.to_list() for r, m in maps.items()}))
    svg_path = render_partition(partition, out / "partition.svg")
    return {
        "workspace": workspace,
        "lidar": lidar,
        "partition": partition,
        "maps": maps,
        "artifacts": with_artifacts(state, partition=json_path, partition_svg=svg_path),
        "log": {"regions": len(partition.fine_regions), "aggregates": len(partition.aggregate_regions)},
    }
