"""src/geometry — 平面几何内核：射线求交、扫描线、平面图、工作空间划分"""
from src.geometry.hull import convex_hull
from src.geometry.io import load_workspace, partition_to_dict, save_workspace, workspace_from_dict
from src.geometry.partition import generate_partition_segments, wksp_partition
from src.geometry.raycast import RayHit, first_hit, ray_segment_intersection
from src.geometry.subdivision import build_planar_subdivision, extract_faces
from src.geometry.sweep import Crossing, plane_sweep_intersections
from src.geometry.types import (
    RAY_EPS,
    TOL,
    ConvexPolygon,
    EdgeId,
    LidarSpec,
    PartitionResult,
    PlanarSubdivision,
    Point2,
    Segment,
    WorkspaceSpec,
)

__all__ = [
    "RAY_EPS",
    "TOL",
    "ConvexPolygon",
    "Crossing",
    "EdgeId",
    "LidarSpec",
    "PartitionResult",
    "PlanarSubdivision",
    "Point2",
    "RayHit",
    "Segment",
    "WorkspaceSpec",
    "build_planar_subdivision",
    "convex_hull",
    "extract_faces",
    "first_hit",
    "generate_partition_segments",
    "load_workspace",
    "partition_to_dict",
    "plane_sweep_intersections",
    "ray_segment_intersection",
    "save_workspace",
    "wksp_partition",
    "workspace_from_dict",
]
