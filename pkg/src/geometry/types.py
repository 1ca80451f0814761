"""src/geometry/types.py — 平面几何基础类型

Point2 / Segment / EdgeId 用 NamedTuple（扫描线等热路径上大量创建）；
多边形、工作空间、LiDAR 参数用 pydantic 模型并在构造时完成校验与规范化。
"""
from __future__ import annotations

import math
from functools import cached_property
from typing import Any, Literal, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from src.errors import InvalidWorkspace

# 坐标比较的绝对容差（米）
TOL = 1e-9
# 射线击中距离下限，排除起点自身
RAY_EPS = 1e-12

RegionKind = Literal["free", "obstacle-interior"]


class Point2(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    p: Point2
    q: Point2

    @property
    def length(self) -> float:
        return math.hypot(self.q.x - self.p.x, self.q.y - self.p.y)


class EdgeId(NamedTuple):
    """障碍物/边界边的标识；polygon 0 为工作空间边界，1..o 为障碍物"""
    polygon: int
    edge: int


def as_point(value: Any) -> Point2:
    """把 (x, y) / [x, y] / Point2 统一成 Point2，并检查有限性"""
    x, y = float(value[0]), float(value[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite coordinate ({x}, {y})")
    return Point2(x, y)


def _normalize_ring(points: list[Point2], tol: float) -> list[Point2]:
    """去重、合并共线顶点，并统一为逆时针"""
    ring: list[Point2] = []
    for p in points:
        if not ring or math.hypot(p.x - ring[-1].x, p.y - ring[-1].y) > tol:
            ring.append(p)
    while len(ring) > 1 and math.hypot(ring[0].x - ring[-1].x, ring[0].y - ring[-1].y) <= tol:
        ring.pop()

    area2 = sum(a.x * b.y - b.x * a.y for a, b in zip(ring, ring[1:] + ring[:1]))
    if area2 < 0:
        ring.reverse()

    # 反复删除到相邻顶点连线距离 ≤ tol 的顶点
    changed = True
    while changed and len(ring) >= 3:
        changed = False
        for i in range(len(ring)):
            a, b, c = ring[i - 1], ring[i], ring[(i + 1) % len(ring)]
            ac = math.hypot(c.x - a.x, c.y - a.y)
            if ac <= tol:
                ring.pop(i)
                changed = True
                break
            cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
            if abs(cross) / ac <= tol:
                ring.pop(i)
                changed = True
                break
    return ring


class ConvexPolygon(BaseModel):
    """严格凸、逆时针、无重复顶点的多边形"""
    model_config = ConfigDict(frozen=True)

    vertices: tuple[Point2, ...]

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data: Any) -> Any:
        if isinstance(data, dict) and "vertices" in data:
            pts = [as_point(v) for v in data["vertices"]]
            ring = _normalize_ring(pts, TOL)
            if len(ring) < 3:
                raise ValueError("polygon needs at least 3 non-collinear vertices")
            for i in range(len(ring)):
                a, b, c = ring[i - 1], ring[i], ring[(i + 1) % len(ring)]
                if (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x) < 0:
                    raise ValueError("polygon is not convex")
            data = {**data, "vertices": tuple(ring)}
        return data

    @classmethod
    def from_points(cls, points) -> "ConvexPolygon":
        return cls(vertices=[as_point(p) for p in points])

    # ── 派生量 ──

    @cached_property
    def area(self) -> float:
        v = self.vertices
        return 0.5 * sum(a.x * b.y - b.x * a.y for a, b in zip(v, v[1:] + v[:1]))

    @cached_property
    def centroid(self) -> Point2:
        v = self.vertices
        cx = cy = 0.0
        for a, b in zip(v, v[1:] + v[:1]):
            w = a.x * b.y - b.x * a.y
            cx += (a.x + b.x) * w
            cy += (a.y + b.y) * w
        k = 1.0 / (6.0 * self.area)
        return Point2(cx * k, cy * k)

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def edges(self) -> list[Segment]:
        v = self.vertices
        return [Segment(a, b) for a, b in zip(v, v[1:] + v[:1])]

    @cached_property
    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        """返回 (H, g)，区域 = {z : H z ≤ g}；每行为单位外法向"""
        rows, rhs = [], []
        for a, b in self.edges():
            nx, ny = b.y - a.y, a.x - b.x
            norm = math.hypot(nx, ny)
            nx, ny = nx / norm, ny / norm
            rows.append((nx, ny))
            rhs.append(nx * a.x + ny * a.y)
        return np.array(rows, dtype=float), np.array(rhs, dtype=float)

    def contains(self, p: Point2, tol: float = TOL) -> bool:
        """闭包含测试（容差 tol）"""
        h, g = self.halfspaces
        return bool(np.all(h @ np.array([p[0], p[1]]) <= g + tol))

    def contains_strict(self, p: Point2, tol: float = TOL) -> bool:
        """严格位于内部且离每条边都超过 tol"""
        h, g = self.halfspaces
        return bool(np.all(h @ np.array([p[0], p[1]]) < g - tol))

    def to_list(self) -> list[list[float]]:
        return [[p.x, p.y] for p in self.vertices]


class WorkspaceSpec(BaseModel):
    """凸边界 + 凸障碍物；障碍物位于边界内且内部两两不相交"""
    model_config = ConfigDict(frozen=True)

    boundary: ConvexPolygon
    obstacles: tuple[ConvexPolygon, ...] = ()

    @model_validator(mode="after")
    def _check(self) -> "WorkspaceSpec":
        self.check()
        return self

    def check(self) -> None:
        """障碍物越界或重叠时抛 InvalidWorkspace"""
        from shapely.geometry import Polygon

        outer = Polygon(self.boundary.to_list())
        shapes = [Polygon(o.to_list()) for o in self.obstacles]
        scale = max(outer.area, 1.0)
        for i, s in enumerate(shapes):
            if s.difference(outer).area > TOL * scale:
                raise InvalidWorkspace(f"obstacle {i + 1} is not inside the workspace boundary")
        for i in range(len(shapes)):
            for j in range(i + 1, len(shapes)):
                if shapes[i].intersection(shapes[j]).area > TOL * scale:
                    raise InvalidWorkspace(f"obstacles {i + 1} and {j + 1} overlap")

    @property
    def polygons(self) -> tuple[ConvexPolygon, ...]:
        """O = {∂W, O_1, …, O_o}，下标即 EdgeId.polygon"""
        return (self.boundary, *self.obstacles)

    @cached_property
    def edge_list(self) -> list[tuple[EdgeId, Segment]]:
        return [
            (EdgeId(pi, ei), seg)
            for pi, poly in enumerate(self.polygons)
            for ei, seg in enumerate(poly.edges())
        ]

    @cached_property
    def edge_array(self) -> np.ndarray:
        """(E, 4) 数组：每行 px, py, qx, qy，顺序与 edge_list 一致"""
        return np.array([[s.p.x, s.p.y, s.q.x, s.q.y] for _, s in self.edge_list], dtype=float)

    def edge(self, eid: EdgeId) -> Segment:
        return self.polygons[eid.polygon].edges()[eid.edge]

    def in_obstacle(self, p: Point2, tol: float = TOL) -> bool:
        """p 落在某个障碍物闭包内"""
        return any(o.contains(p, tol) for o in self.obstacles)

    def in_free_space(self, p: Point2, tol: float = TOL) -> bool:
        """p 严格位于边界内部且不触碰任何障碍物"""
        return self.boundary.contains_strict(p, tol) and not self.in_obstacle(p, tol)

    @property
    def area(self) -> float:
        return self.boundary.area


class LidarSpec(BaseModel):
    """N 束等角分布激光；primary_indices 为 1-based 主激光下标"""
    model_config = ConfigDict(frozen=True)

    laser_count: int = Field(ge=1)
    heading: float = 0.0
    # 空 = 全部激光都是主激光
    primary_indices: tuple[int, ...] = Field(default=(), validate_default=True)

    @field_validator("primary_indices")
    @classmethod
    def _check_primary(cls, value: tuple[int, ...], info: ValidationInfo) -> tuple[int, ...]:
        n = info.data.get("laser_count")
        if n is None:
            return value
        if not value:
            return tuple(range(1, n + 1))
        bad = [i for i in value if not 1 <= i <= n]
        if bad:
            raise ValueError(f"primary laser indices out of range: {bad}")
        return tuple(sorted(set(value)))

    @property
    def angles(self) -> list[float]:
        """θ_i = θ_lidar + (i−1)·2π/N"""
        return [self.heading + i * 2.0 * math.pi / self.laser_count for i in range(self.laser_count)]

    @property
    def primary_angles(self) -> list[float]:
        angles = self.angles
        return [angles[i - 1] for i in self.primary_indices]


def direction(angle: float) -> tuple[float, float]:
    """单位方向向量；|分量| < 1e-15 归零，使轴向激光严格轴对齐"""
    c, s = math.cos(angle), math.sin(angle)
    if abs(c) < 1e-15:
        c = 0.0
    if abs(s) < 1e-15:
        s = 0.0
    return c, s


class PlanarSubdivision(BaseModel):
    """平面图：节点 + 无向边（节点下标对，u < v）"""
    model_config = ConfigDict(frozen=True)

    nodes: tuple[Point2, ...]
    edges: tuple[tuple[int, int], ...]


class PartitionResult(BaseModel):
    """工作空间划分结果：细分区 W* 与聚合分区 W′"""
    model_config = ConfigDict(frozen=True)

    workspace: WorkspaceSpec
    fine_regions: tuple[ConvexPolygon, ...]
    aggregate_regions: tuple[ConvexPolygon, ...]
    fine_to_aggregate: tuple[int, ...]
    region_kind: tuple[RegionKind, ...]
    # 聚合面的原始环（可能非凸），用于包含判断
    aggregate_cycles: tuple[tuple[Point2, ...], ...] = ()
    fine_segment_count: int = 0
    aggregate_segment_count: int = 0

    @property
    def free_indices(self) -> list[int]:
        return [i for i, k in enumerate(self.region_kind) if k == "free"]

    def region_of(self, p: Point2, tol: float = TOL) -> int | None:
        """返回包含 p 的第一个细分区下标（闭包含）"""
        for i, r in enumerate(self.fine_regions):
            if r.contains(p, tol):
                return i
        return None
