"""src/geometry/raycast.py — 射线与线段/工作空间求交"""
from __future__ import annotations

import math
from typing import NamedTuple

from src.errors import NoHit
from src.geometry.predicates import cross
from src.geometry.types import RAY_EPS, EdgeId, Point2, Segment, WorkspaceSpec, direction


class RayHit(NamedTuple):
    point: Point2
    edge: EdgeId


def _cast(ox: float, oy: float, c: float, s: float, seg: Segment) -> tuple[float, Point2] | None:
    """沿单位方向 (c, s) 的闭射线与 seg 求交，返回 (距离 t, 交点)"""
    (px, py), (qx, qy) = seg
    ex, ey = qx - px, qy - py
    elen = math.hypot(ex, ey)
    if elen == 0.0:
        return None
    wx, wy = px - ox, py - oy
    denom = cross(c, s, ex, ey)

    if abs(denom) <= RAY_EPS * elen:
        # 平行：只有共线时才可能相交
        if abs(cross(wx, wy, ex, ey)) / elen > RAY_EPS * max(1.0, elen):
            return None
        tp = wx * c + wy * s
        tq = (qx - ox) * c + (qy - oy) * s
        lo, hi = min(tp, tq), max(tp, tq)
        if lo > RAY_EPS:
            t = lo
        elif hi > RAY_EPS:
            t = hi
        else:
            return None
        end = seg.p if t == tp else seg.q
        return t, Point2(end[0], end[1])

    t = cross(wx, wy, ex, ey) / denom
    u = cross(wx, wy, c, s) / denom
    slack = RAY_EPS / elen
    if t < -RAY_EPS or u < -slack or u > 1.0 + slack:
        return None
    u = min(1.0, max(0.0, u))
    return max(t, 0.0), Point2(px + u * ex, py + u * ey)


def ray_segment_intersection(origin: Point2, angle: float, seg: Segment) -> Point2 | None:
    """
    射线 Ray(origin, angle) 与闭线段的最近交点

    共线重叠时返回距起点 > 0 的最近重叠点；射线起点位于重叠段内部时返回重叠段远端。
    """
    c, s = direction(angle)
    hit = _cast(origin[0], origin[1], c, s, seg)
    return None if hit is None else hit[1]


def first_hit(
    origin: Point2,
    angle: float,
    workspace: WorkspaceSpec,
    min_distance: float = RAY_EPS,
) -> RayHit:
    """
    射线与 O* 的第一个交点（距离 > min_distance）

    距离在 RAY_EPS 内相同的候选按 EdgeId 取最小者，保证穿过顶点的射线结果确定。

    Raises:
        NoHit: 射线没有击中任何边（起点不在工作空间内部）
    """
    c, s = direction(angle)
    ox, oy = origin[0], origin[1]
    best: tuple[float, EdgeId, Point2] | None = None
    for eid, seg in workspace.edge_list:
        hit = _cast(ox, oy, c, s, seg)
        if hit is None or hit[0] <= min_distance:
            continue
        t, p = hit
        if best is None or t < best[0] - RAY_EPS or (abs(t - best[0]) <= RAY_EPS and eid < best[1]):
            best = (t, eid, p)
    if best is None:
        raise NoHit(f"ray from ({ox:.6g}, {oy:.6g}) at angle {angle:.6g} hits nothing")
    return RayHit(best[2], best[1])
