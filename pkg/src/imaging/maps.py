"""src/imaging/maps.py — 区域内的仿射 LiDAR 成像映射

在成像自适应区域 R 内，第 k 束激光总是击中同一条边 (a_k, b_k)，
因此 d_k(ζ) = P_k ζ + Q_k 是 ζ 的仿射函数。
"""
from __future__ import annotations

import logging
import math
from functools import cached_property
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.errors import NotImagingAdapted, OutOfRegion, ParallelDegenerate
from src.geometry.raycast import first_hit
from src.geometry.types import TOL, ConvexPolygon, EdgeId, LidarSpec, Point2, WorkspaceSpec, direction

logger = logging.getLogger(__name__)

# 顶点向重心内缩的比例，用于检查区域是否成像自适应
_VERTEX_PULL = 1e-6


class HitEdge(BaseModel):
    """激光在区域内扫过的击中边子段 (a, b)"""
    model_config = ConfigDict(frozen=True)

    a: Point2
    b: Point2
    source: EdgeId

    def to_dict(self) -> dict[str, Any]:
        return {"a": [self.a.x, self.a.y], "b": [self.b.x, self.b.y],
                "polygon": self.source.polygon, "edge": self.source.edge}


class AffineImagingMap(BaseModel):
    """一个区域的全部 N 束激光的仿射映射；P 形状 (N, 2, 2)，Q 形状 (N, 2)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    region: ConvexPolygon
    angles: tuple[float, ...]
    edges: tuple[HitEdge, ...]
    P: np.ndarray
    Q: np.ndarray

    @property
    def laser_count(self) -> int:
        return len(self.angles)

    @cached_property
    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        """堆叠形式 d = P_all ζ + Q_all，P_all 为 (2N, 2)，Q_all 为 (2N,)"""
        return self.P.reshape(-1, 2), self.Q.reshape(-1)

    def to_list(self) -> list[dict[str, Any]]:
        return [
            {"angle": self.angles[k], "P": self.P[k].tolist(), "Q": self.Q[k].tolist(),
             "edge": self.edges[k].to_dict()}
            for k in range(self.laser_count)
        ]


def _edge_param(origin: Point2, c: float, s: float, p: Point2, ex: float, ey: float) -> float:
    """沿激光方向把 origin 投影到边所在直线上的参数 u"""
    denom = c * ey - s * ex
    if abs(denom) <= 1e-12 * math.hypot(ex, ey):
        raise ParallelDegenerate("laser direction is parallel to the hit edge")
    wx, wy = p.x - origin[0], p.y - origin[1]
    return (wx * s - wy * c) / denom


def hit_edge_for_region(region: ConvexPolygon, angle: float, workspace: WorkspaceSpec) -> HitEdge:
    """
    区域内激光 angle 的击中边

    边的身份取自重心处的射线；(a, b) 为各顶点沿激光方向在该边上的投影的极值（裁剪到边上）。

    Raises:
        NotImagingAdapted: 内缩后的顶点射线击中了不同的边
        ParallelDegenerate: 激光方向与击中边平行
    """
    center = region.centroid
    hit = first_hit(center, angle, workspace)
    eid = hit.edge
    seg = workspace.edge(eid)

    for v in region.vertices:
        probe = Point2(v.x + _VERTEX_PULL * (center.x - v.x), v.y + _VERTEX_PULL * (center.y - v.y))
        other = first_hit(probe, angle, workspace).edge
        if other != eid:
            raise NotImagingAdapted(
                f"laser at angle {angle:.6g}: vertex ({v.x:.6g}, {v.y:.6g}) hits {other}, centroid hits {eid}"
            )

    c, s = direction(angle)
    ex, ey = seg.q.x - seg.p.x, seg.q.y - seg.p.y
    params = [_edge_param(v, c, s, seg.p, ex, ey) for v in region.vertices]
    lo, hi = max(0.0, min(params)), min(1.0, max(params))
    a = Point2(seg.p.x + lo * ex, seg.p.y + lo * ey)
    b = Point2(seg.p.x + hi * ex, seg.p.y + hi * ey)
    return HitEdge(a=a, b=b, source=eid)


def imaging_map(region: ConvexPolygon, angle: float, edge: HitEdge) -> tuple[np.ndarray, np.ndarray]:
    """
    d_k(ζ) = z − ζ，z = a + ν (b − a) 位于激光射线上

    联立 a + ν e = ζ + r (cos θ, sin θ) 解 2×2 线性方程得 ν = A_ν ζ + b_ν，
    于是 P = e A_ν − I，Q = a + e b_ν。竖直激光无需单独分支。
    """
    c, s = direction(angle)
    a = np.array(edge.a, dtype=float)
    e = np.array(edge.b, dtype=float) - a
    m = np.array([[e[0], -c], [e[1], -s]])
    if abs(np.linalg.det(m)) <= 1e-12 * max(float(np.linalg.norm(e)), 1.0):
        raise ParallelDegenerate(f"laser at angle {angle:.6g} is parallel to edge {edge.source}")
    # [ν, r]ᵀ = M⁻¹ (ζ − a)，只需要第一行
    a_nu = np.linalg.solve(m.T, np.array([1.0, 0.0]))
    b_nu = -float(a_nu @ a)
    P = np.outer(e, a_nu) - np.eye(2)
    Q = a + e * b_nu
    return P, Q


def region_imaging_maps(region: ConvexPolygon, lidar: LidarSpec, workspace: WorkspaceSpec) -> AffineImagingMap:
    """区域 R 对全部 N 束激光的仿射成像映射"""
    edges, Ps, Qs = [], [], []
    for angle in lidar.angles:
        edge = hit_edge_for_region(region, angle, workspace)
        P, Q = imaging_map(region, angle, edge)
        edges.append(edge)
        Ps.append(P)
        Qs.append(Q)
    return AffineImagingMap(
        region=region,
        angles=tuple(lidar.angles),
        edges=tuple(edges),
        P=np.stack(Ps),
        Q=np.stack(Qs),
    )


def partition_imaging_maps(partition, lidar: LidarSpec) -> dict[int, AffineImagingMap]:
    """所有自由细分区的成像映射，键为细分区下标"""
    maps = {
        i: region_imaging_maps(partition.fine_regions[i], lidar, partition.workspace)
        for i in partition.free_indices
    }
    logger.info(f"成像映射: {len(maps)} 个自由区域 × {lidar.laser_count} 束激光")
    return maps


def lidar_image_affine(position: Point2, maps: AffineImagingMap, tol: float = TOL) -> np.ndarray:
    """
    d = (P_1 ζ + Q_1, …, P_N ζ + Q_N)

    Raises:
        OutOfRegion: position 不在 maps 所属区域内（容差 tol）
    """
    if not maps.region.contains(position, tol):
        raise OutOfRegion(f"position ({position[0]:.6g}, {position[1]:.6g}) is outside the region")
    P_all, Q_all = maps.stacked
    return P_all @ np.array([position[0], position[1]], dtype=float) + Q_all
