"""src/geometry/hull.py — 凸包（Andrew 单调链）"""
from __future__ import annotations

from src.errors import DegenerateInput
from src.geometry.predicates import orient2d
from src.geometry.types import ConvexPolygon, Point2, as_point


def convex_hull(points) -> ConvexPolygon:
    """
    逆时针凸包，边上的共线点被移除

    Raises:
        DegenerateInput: 点数不足 3 个或全部共线
    """
    pts = sorted(set(as_point(p) for p in points))
    if len(pts) < 3:
        raise DegenerateInput(f"convex hull needs at least 3 distinct points, got {len(pts)}")

    def half(seq: list[Point2]) -> list[Point2]:
        chain: list[Point2] = []
        for p in seq:
            while len(chain) >= 2 and orient2d(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    ring = lower[:-1] + upper[:-1]
    if len(ring) < 3:
        raise DegenerateInput("all points are collinear")
    try:
        return ConvexPolygon(vertices=ring)
    except ValueError as e:
        # 规范化后顶点不足（近似共线）
        raise DegenerateInput(f"degenerate hull: {e}") from e
