"""src/geometry/sweep.py — 自上而下的 Bentley–Ottmann 扫描线求所有线段交点

扫描线从最高 y 向下推进，同一 y 上从左到右。线段在上端点进入状态结构，
在下端点离开；每个事件点只让新出现的相邻线段对求交。
"""
from __future__ import annotations

import heapq
import logging
import math
from typing import NamedTuple

from sortedcontainers import SortedList

from src.geometry.predicates import point_segment_distance, segment_intersections
from src.geometry.types import TOL, Point2, Segment

logger = logging.getLogger(__name__)


class Crossing(NamedTuple):
    point: Point2
    segments: tuple[int, ...]       # 经过该点的线段下标（升序）


class PointIndex:
    """网格哈希点集：距离 ≤ tol 的点合并为同一个节点"""

    def __init__(self, tol: float = TOL, cell: float = 1e-6):
        self.tol = tol
        self.cell = max(cell, 4 * tol)
        self.points: list[Point2] = []
        self._grid: dict[tuple[int, int], list[int]] = {}

    def _key(self, p: Point2) -> tuple[int, int]:
        return math.floor(p[0] / self.cell), math.floor(p[1] / self.cell)

    def find(self, p: Point2) -> int | None:
        kx, ky = self._key(p)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for idx in self._grid.get((kx + dx, ky + dy), ()):
                    q = self.points[idx]
                    if math.hypot(p[0] - q[0], p[1] - q[1]) <= self.tol:
                        return idx
        return None

    def add(self, p: Point2) -> int:
        """插入 p 并返回节点下标；已有邻近点时返回已有下标"""
        idx = self.find(p)
        if idx is not None:
            return idx
        idx = len(self.points)
        self.points.append(Point2(float(p[0]), float(p[1])))
        self._grid.setdefault(self._key(p), []).append(idx)
        return idx

    def __len__(self) -> int:
        return len(self.points)


class _SweepLine:
    """扫描线当前位置；状态结构里的所有比较都在这个位置求值"""

    def __init__(self, tol: float):
        self.tol = tol
        self.x = 0.0
        self.y = math.inf


def _precedes(a: tuple[float, float, int], b: tuple[float, float, int], tol: float) -> bool:
    if abs(a[0] - b[0]) > tol:
        return a[0] < b[0]
    if a[1] != b[1]:
        return a[1] < b[1]
    return a[2] < b[2]


class _Ordered:
    line: _SweepLine

    def key(self) -> tuple[float, float, int]:
        raise NotImplementedError

    def __lt__(self, other: _Ordered) -> bool:
        return _precedes(self.key(), other.key(), self.line.tol)


class _Active(_Ordered):
    """状态结构中的线段：按扫描线处的 x 排序，x 相同时按扫描线以下的走向排序"""

    __slots__ = ("sid", "segment", "slope", "line")

    def __init__(self, sid: int, upper: Point2, lower: Point2, line: _SweepLine):
        self.sid = sid
        self.segment = Segment(upper, lower)
        dy = upper.y - lower.y
        self.slope = (lower.x - upper.x) / dy if dy > 0 else math.inf
        self.line = line

    def x_at(self) -> float:
        (ux, uy), (lx, ly) = self.segment
        if self.slope == math.inf:
            return min(max(self.line.x, ux), lx)
        t = min(max((uy - self.line.y) / (uy - ly), 0.0), 1.0)
        return ux + t * (lx - ux)

    def key(self) -> tuple[float, float, int]:
        return self.x_at(), self.slope, self.sid

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Active) and other.sid == self.sid

    def __hash__(self) -> int:
        return self.sid


class _Probe(_Ordered):
    """事件点本身，排在 x 相同的所有线段之前"""

    def __init__(self, line: _SweepLine):
        self.line = line

    def key(self) -> tuple[float, float, int]:
        return self.line.x, -math.inf, -1


def _position(status: SortedList, entry: _Active) -> int:
    try:
        return status.index(entry)
    except ValueError:
        return next(i for i, other in enumerate(status) if other.sid == entry.sid)


def _discard(status: SortedList, entry: _Active) -> None:
    del status[_position(status, entry)]


def plane_sweep_intersections(segments: list[Segment], tol: float = TOL) -> list[Crossing]:
    """
    所有线段两两之间的交点（含共享端点），每个点只报告一次并附带全部关联线段

    Bentley–Ottmann：事件点按 (y 降序, x 升序) 出队；状态结构是按扫描线处
    x 排序的 SortedList，只有在状态结构中相邻过的线段才求交。
    输出即扫描顺序。零长度线段被忽略。
    """
    segments = [Segment(Point2(*s[0]), Point2(*s[1])) for s in segments]
    line = _SweepLine(tol)
    probe = _Probe(line)
    index = PointIndex(tol)
    starts: dict[int, list[_Active]] = {}
    ends: dict[int, list[int]] = {}
    lower_node: dict[int, int] = {}
    events: list[tuple[float, float, int]] = []
    queued: set[int] = set()

    def push(node: int) -> None:
        if node not in queued:
            queued.add(node)
            q = index.points[node]
            heapq.heappush(events, (-q.y, q.x, node))

    for sid, seg in enumerate(segments):
        a, b = index.add(seg.p), index.add(seg.q)
        if a == b:
            continue
        pa, pb = index.points[a], index.points[b]
        if (-pa.y, pa.x) > (-pb.y, pb.x):
            a, b, pa, pb = b, a, pb, pa
        starts.setdefault(a, []).append(_Active(sid, pa, pb, line))
        ends.setdefault(b, []).append(sid)
        lower_node[sid] = b
        push(a)
        push(b)

    status = SortedList()
    alive: dict[int, _Active] = {}
    found: list[Crossing] = []
    tests = 0

    def check(left: _Active, right: _Active, p: Point2) -> None:
        nonlocal tests
        tests += 1
        for q in segment_intersections(left.segment, right.segment, tol):
            if index.find(q) is not None:
                continue
            if (-q.y, q.x) < (-p.y, p.x):
                logger.debug(f"扫描线已越过交点 {q}，忽略")
                continue
            push(index.add(q))

    while events:
        _, _, node = heapq.heappop(events)
        p = index.points[node]
        line.x, line.y = p.x, p.y

        lo = status.bisect_left(probe)
        hits: list[int] = []
        for i, step in ((lo - 1, -1), (lo, 1)):
            while 0 <= i < len(status):
                entry = status[i]
                on = point_segment_distance(p, entry.segment) <= tol
                if not on and abs(entry.x_at() - p.x) > tol:
                    break
                if on:
                    hits.append(i)
                i += step
        through = [status[i] for i in hits]
        for i in sorted(hits, reverse=True):
            del status[i]
        seen = {e.sid for e in through}
        for sid in ends.get(node, ()):
            if sid in alive and sid not in seen:
                _discard(status, alive[sid])
                through.append(alive[sid])
                seen.add(sid)

        upper = starts.get(node, [])
        touching = seen | {e.sid for e in upper}
        if len(touching) > 1:
            found.append(Crossing(p, tuple(sorted(touching))))

        continuing = [e for e in through if lower_node[e.sid] != node]
        for e in through:
            alive.pop(e.sid, None)
        inserted = upper + continuing
        for e in inserted:
            status.add(e)
            alive[e.sid] = e

        if not inserted:
            at = status.bisect_left(probe)
            if 0 < at < len(status):
                check(status[at - 1], status[at], p)
            continue
        positions = sorted(_position(status, e) for e in inserted)
        first, last = positions[0], positions[-1]
        if first > 0:
            check(status[first - 1], status[first], p)
        if last + 1 < len(status):
            check(status[last], status[last + 1], p)

    logger.debug(f"扫描线完成: {len(segments)} 条线段, {tests} 次求交测试, {len(found)} 个交点")
    return found
