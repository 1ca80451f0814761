"""src/geometry/subdivision.py — 平面图构建与面提取"""
from __future__ import annotations

import logging
import math

from src.geometry.predicates import segment_param, signed_area
from src.geometry.sweep import PointIndex, plane_sweep_intersections
from src.geometry.types import TOL, PlanarSubdivision, Point2, Segment

logger = logging.getLogger(__name__)

Face = tuple[int, ...]


def build_planar_subdivision(segments: list[Segment], tol: float = TOL) -> PlanarSubdivision:
    """
    节点 = 端点 ∪ 交点（距离 ≤ tol 的合并）；每条线段在其上所有节点处切开

    重复的无向边只保留一条，自环丢弃。
    """
    segments = [Segment(Point2(*s[0]), Point2(*s[1])) for s in segments]
    index = PointIndex(tol)
    on_segment: list[set[int]] = []
    for seg in segments:
        on_segment.append({index.add(seg.p), index.add(seg.q)})

    for crossing in plane_sweep_intersections(segments, tol):
        node = index.add(crossing.point)
        for sid in crossing.segments:
            on_segment[sid].add(node)

    edges: set[tuple[int, int]] = set()
    for seg, nodes in zip(segments, on_segment):
        chain = sorted(nodes, key=lambda n: segment_param(index.points[n], seg))
        for u, v in zip(chain, chain[1:]):
            if u != v:
                edges.add((min(u, v), max(u, v)))

    logger.debug(f"平面图: {len(index)} 个节点, {len(edges)} 条边")
    return PlanarSubdivision(nodes=tuple(index.points), edges=tuple(sorted(edges)))


def extract_faces(sub: PlanarSubdivision) -> list[Face]:
    """
    提取所有有界面（节点下标环，逆时针）

    从半边 u→v 出发，在 v 处取 u 之前（顺时针方向上紧邻）的邻居继续前进；
    每条半边恰好走一次，有向面积为正的环即有界面，外部面被排除。
    """
    nodes = sub.nodes
    adjacency: dict[int, list[int]] = {}
    for u, v in sub.edges:
        adjacency.setdefault(u, []).append(v)
        adjacency.setdefault(v, []).append(u)
    for u, nbrs in adjacency.items():
        ux, uy = nodes[u]
        nbrs.sort(key=lambda w: math.atan2(nodes[w][1] - uy, nodes[w][0] - ux))
    position = {(u, w): i for u, nbrs in adjacency.items() for i, w in enumerate(nbrs)}

    visited: set[tuple[int, int]] = set()
    faces: list[Face] = []
    for start in sorted(position):
        if start in visited:
            continue
        cycle: list[int] = []
        u, v = start
        while (u, v) not in visited:
            visited.add((u, v))
            cycle.append(u)
            nbrs = adjacency[v]
            w = nbrs[(position[(v, u)] - 1) % len(nbrs)]
            u, v = v, w
        if len(cycle) >= 3 and signed_area([nodes[i] for i in cycle]) > 0:
            faces.append(tuple(cycle))

    logger.debug(f"面提取: {len(faces)} 个有界面")
    return faces


def face_points(sub: PlanarSubdivision, face: Face) -> list[Point2]:
    return [sub.nodes[i] for i in face]
