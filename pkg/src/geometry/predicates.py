"""src/geometry/predicates.py — 鲁棒几何谓词

orient2d 先做浮点误差界过滤，落入不确定区间时退回 Fraction 精确计算，
保证返回值符号总是正确的。
"""
from __future__ import annotations

import math
import sys
from fractions import Fraction

from src.geometry.types import TOL, Point2, Segment

_EPS = sys.float_info.epsilon / 2.0
_CCW_ERRBOUND_A = (3.0 + 16.0 * _EPS) * _EPS


def _orient_exact(a: Point2, b: Point2, c: Point2) -> Fraction:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)


def orient2d(a: Point2, b: Point2, c: Point2) -> float:
    """
    (a, b, c) 的两倍有向面积：> 0 逆时针，< 0 顺时针，0 共线

    浮点结果可信时直接返回，否则返回精确值的浮点近似（符号精确）。
    """
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright

    if detleft > 0.0:
        if detright <= 0.0:
            return det
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            return det
        detsum = -detleft - detright
    else:
        return det

    if abs(det) >= _CCW_ERRBOUND_A * detsum:
        return det

    exact = _orient_exact(a, b, c)
    if exact == 0:
        return 0.0
    value = float(exact)
    # 极小值转 float 可能下溢为 0，保留符号
    return value if value != 0.0 else math.copysign(sys.float_info.min, exact)


def orientation(a: Point2, b: Point2, c: Point2) -> int:
    """orient2d 的符号：+1 / -1 / 0"""
    d = orient2d(a, b, c)
    return int(d > 0) - int(d < 0)


def cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def point_segment_distance(p: Point2, seg: Segment) -> float:
    """点到闭线段的欧氏距离"""
    (px, py), ((ax, ay), (bx, by)) = p, seg
    ex, ey = bx - ax, by - ay
    ll = ex * ex + ey * ey
    if ll == 0.0:
        return math.hypot(px - ax, py - ay)
    u = ((px - ax) * ex + (py - ay) * ey) / ll
    u = min(1.0, max(0.0, u))
    return math.hypot(px - (ax + u * ex), py - (ay + u * ey))


def segment_param(p: Point2, seg: Segment) -> float:
    """p 在 seg 所在直线上的投影参数（p + u·(q − p)）"""
    (ax, ay), (bx, by) = seg
    ex, ey = bx - ax, by - ay
    return ((p[0] - ax) * ex + (p[1] - ay) * ey) / (ex * ex + ey * ey)


def line_distance(p: Point2, seg: Segment) -> float:
    """点到 seg 所在直线的距离"""
    (ax, ay), (bx, by) = seg
    return abs(cross(bx - ax, by - ay, p[0] - ax, p[1] - ay)) / math.hypot(bx - ax, by - ay)


def collinear_overlap(s1: Segment, s2: Segment, tol: float = TOL) -> float:
    """两条线段共线时返回重叠长度，不共线返回 0"""
    if line_distance(s2.p, s1) > tol or line_distance(s2.q, s1) > tol:
        return 0.0
    length = s1.length
    if length == 0.0:
        return 0.0
    u1, u2 = sorted((segment_param(s2.p, s1), segment_param(s2.q, s1)))
    lo, hi = max(0.0, u1), min(1.0, u2)
    return max(0.0, hi - lo) * length


def segment_intersections(s1: Segment, s2: Segment, tol: float = TOL) -> list[Point2]:
    """
    两条闭线段的交点

    - 端点落在另一条线段上（距离 ≤ tol）直接作为交点，覆盖 T 型接触与共线重叠的端点
    - 否则用精确符号的 orient2d 判断真相交，再求直线交点

    返回 0、1 或 2 个点（2 个仅出现在共线重叠时）。
    """
    (p1, q1), (p2, q2) = s1, s2
    if (max(p1.x, q1.x) < min(p2.x, q2.x) - tol or max(p2.x, q2.x) < min(p1.x, q1.x) - tol
            or max(p1.y, q1.y) < min(p2.y, q2.y) - tol or max(p2.y, q2.y) < min(p1.y, q1.y) - tol):
        return []

    touches: list[Point2] = []
    for p, other in ((p1, s2), (q1, s2), (p2, s1), (q2, s1)):
        if point_segment_distance(p, other) <= tol:
            if all(math.hypot(p.x - t.x, p.y - t.y) > tol for t in touches):
                touches.append(p)
    if touches:
        return touches

    o1, o2 = orientation(p1, q1, p2), orientation(p1, q1, q2)
    o3, o4 = orientation(p2, q2, p1), orientation(p2, q2, q1)
    if o1 * o2 >= 0 or o3 * o4 >= 0:
        return []

    e1x, e1y = q1.x - p1.x, q1.y - p1.y
    e2x, e2y = q2.x - p2.x, q2.y - p2.y
    denom = cross(e1x, e1y, e2x, e2y)
    t = cross(p2.x - p1.x, p2.y - p1.y, e2x, e2y) / denom
    t = min(1.0, max(0.0, t))
    return [Point2(p1.x + t * e1x, p1.y + t * e1y)]


def signed_area(points: list[Point2]) -> float:
    """环的有向面积（逆时针为正）"""
    return 0.5 * sum(a[0] * b[1] - b[0] * a[1] for a, b in zip(points, points[1:] + points[:1]))


def ring_centroid(points: list[Point2]) -> Point2:
    """简单多边形环的面积重心"""
    area = signed_area(points)
    cx = cy = 0.0
    for a, b in zip(points, points[1:] + points[:1]):
        w = a[0] * b[1] - b[0] * a[1]
        cx += (a[0] + b[0]) * w
        cy += (a[1] + b[1]) * w
    return Point2(cx / (6.0 * area), cy / (6.0 * area))
