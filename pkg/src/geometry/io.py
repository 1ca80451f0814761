"""src/geometry/io.py — 工作空间 JSON 读写"""
from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src.errors import InvalidWorkspace
from src.geometry.types import PartitionResult, WorkspaceSpec
from src.utils.jsonio import dump_json, load_json, pydantic_location, validate_schema

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_RING = {"type": "array", "items": _POINT, "minItems": 3}

WORKSPACE_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["boundary"],
    "properties": {
        "format_version": {"type": "integer"},
        "boundary": _RING,
        "obstacles": {"type": "array", "items": _RING},
    },
}


def workspace_from_dict(data: dict[str, Any], path: str | None = None) -> WorkspaceSpec:
    """校验并构造 WorkspaceSpec；几何不合法抛 InvalidWorkspace"""
    validate_schema(data, WORKSPACE_SCHEMA, path=path)
    try:
        return WorkspaceSpec(
            boundary={"vertices": data["boundary"]},
            obstacles=[{"vertices": ring} for ring in data.get("obstacles", [])],
        )
    except ValidationError as e:
        where = pydantic_location(e)
        raise InvalidWorkspace(f"{e.errors()[0]['msg']} (at {where}{f' in {path}' if path else ''})") from e


def workspace_to_dict(workspace: WorkspaceSpec) -> dict[str, Any]:
    return {
        "boundary": workspace.boundary.to_list(),
        "obstacles": [o.to_list() for o in workspace.obstacles],
    }


def load_workspace(path: str | Path) -> WorkspaceSpec:
    return workspace_from_dict(load_json(path), path=str(path))


def save_workspace(workspace: WorkspaceSpec, path: str | Path) -> Path:
    return dump_json(path, workspace_to_dict(workspace))


def partition_to_dict(partition: PartitionResult, maps: dict[int, list[dict]] | None = None) -> dict[str, Any]:
    """分区导出：每个区域的顶点、kind、aggregate，以及（若给出）各激光的成像映射"""
    regions = []
    for i, region in enumerate(partition.fine_regions):
        entry: dict[str, Any] = {
            "index": i,
            "vertices": region.to_list(),
            "kind": partition.region_kind[i],
            "aggregate": partition.fine_to_aggregate[i],
        }
        if maps is not None and i in maps:
            entry["imaging"] = maps[i]
        regions.append(entry)
    return {
        "workspace": workspace_to_dict(partition.workspace),
        "regions": regions,
        "aggregates": [
            {"index": a, "hull": poly.to_list(), "cycle": [[p.x, p.y] for p in partition.aggregate_cycles[a]]}
            for a, poly in enumerate(partition.aggregate_regions)
        ],
        "counts": {
            "fine_regions": len(partition.fine_regions),
            "free_regions": len(partition.free_indices),
            "aggregate_regions": len(partition.aggregate_regions),
            "fine_segments": partition.fine_segment_count,
            "aggregate_segments": partition.aggregate_segment_count,
        },
    }
