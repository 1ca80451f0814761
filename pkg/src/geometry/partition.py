"""src/geometry/partition.py — 成像自适应的工作空间划分"""
from __future__ import annotations

import logging
import math
import time

from shapely.geometry import Point as ShapelyPoint
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.strtree import STRtree

from src.errors import DegenerateInput, NoHit, NumericalFailure
from src.geometry.hull import convex_hull
from src.geometry.predicates import collinear_overlap, cross, ring_centroid
from src.geometry.raycast import first_hit, ray_segment_intersection
from src.geometry.subdivision import build_planar_subdivision, extract_faces, face_points
from src.geometry.types import (
    TOL,
    ConvexPolygon,
    LidarSpec,
    PartitionResult,
    Point2,
    RegionKind,
    Segment,
    WorkspaceSpec,
)

logger = logging.getLogger(__name__)


def generate_partition_segments(
    workspace: WorkspaceSpec,
    angles: list[float],
    include_boundary_vertices: bool = True,
    tol: float = TOL,
) -> list[Segment]:
    """
    G = ∪_k G_k：从每个顶点 v 沿 θ_k + π 发射射线，取到第一个击中点 z 的线段 Line(v, z)

    跳过：无击中、零长度、与已有边共线重叠、中点落在障碍物内部（射线射入障碍物）。
    同一线段只输出一次。
    """
    polygons = workspace.polygons if include_boundary_vertices else workspace.obstacles
    edges = [seg for _, seg in workspace.edge_list]
    seen: set[tuple[tuple[float, float], tuple[float, float]]] = set()
    result: list[Segment] = []

    for poly in polygons:
        for v in poly.vertices:
            for theta in angles:
                try:
                    hit = first_hit(v, theta + math.pi, workspace)
                except NoHit:
                    continue
                seg = Segment(v, hit.point)
                if seg.length <= tol:
                    continue
                if any(collinear_overlap(e, seg, tol) > tol for e in edges):
                    continue
                mid = Point2((v.x + hit.point.x) / 2, (v.y + hit.point.y) / 2)
                if any(o.contains_strict(mid, tol) for o in workspace.obstacles):
                    continue
                key = tuple(sorted(((round(v.x, 9), round(v.y, 9)),
                                    (round(hit.point.x, 9), round(hit.point.y, 9)))))
                if key in seen:
                    continue
                seen.add(key)
                result.append(seg)
    return result


def _faces(workspace: WorkspaceSpec, segments: list[Segment], tol: float) -> list[list[Point2]]:
    """E ∪ G 的平面图中所有有界面（点环）"""
    all_segments = [seg for _, seg in workspace.edge_list] + list(segments)
    sub = build_planar_subdivision(all_segments, tol)
    return [face_points(sub, f) for f in extract_faces(sub)]


def _turn(a: Point2, b: Point2, c: Point2) -> float:
    """b 处转角的正弦：< 0 为右转（逆时针环上的反射顶点）"""
    e1x, e1y = b.x - a.x, b.y - a.y
    e2x, e2y = c.x - b.x, c.y - b.y
    norm = math.hypot(e1x, e1y) * math.hypot(e2x, e2y)
    return cross(e1x, e1y, e2x, e2y) / norm if norm > 0.0 else 0.0


def _arc(ring: list[Point2], start: int, stop: int) -> list[Point2]:
    """ring[start], ring[start+1], …, ring[stop]（循环下标）"""
    n = len(ring)
    return [ring[(start + s) % n] for s in range((stop - start) % n + 1)]


def _split_at_reflex(ring: list[Point2], i: int, tol: float) -> tuple[list[Point2], list[Point2]]:
    """沿入边方向把反射顶点 ring[i] 延长到对面的边界，切成两块"""
    n = len(ring)
    a, v = ring[i - 1], ring[i]
    angle = math.atan2(v.y - a.y, v.x - a.x)
    best: tuple[float, int, Point2] | None = None
    for k in range(n):
        j = (k + 1) % n
        if i in (k, j):
            continue
        z = ray_segment_intersection(v, angle, Segment(ring[k], ring[j]))
        if z is None:
            continue
        t = math.hypot(z.x - v.x, z.y - v.y)
        if t > tol and (best is None or t < best[0]):
            best = (t, k, z)
    if best is None:
        raise NumericalFailure(f"反射顶点 {v} 的延长线没有击中面边界")

    _, k, z = best
    j = (k + 1) % n
    for idx in (k, j):
        if math.hypot(z.x - ring[idx].x, z.y - ring[idx].y) <= tol:
            return _arc(ring, i, idx), _arc(ring, idx, i)
    return _arc(ring, i, k) + [z], [z] + _arc(ring, j, i)


def convex_pieces(ring: list[Point2], tol: float = TOL) -> list[list[Point2]]:
    """
    把逆时针简单多边形切成凸块

    每次取一个反射顶点，沿入边延长线切开；切线两侧都继承原面的成像一致性。
    """
    pending, done = [list(ring)], []
    for _ in range(4 * len(ring) + 4):
        if not pending:
            return done
        piece = pending.pop()
        n = len(piece)
        reflex = next((i for i in range(n) if _turn(piece[i - 1], piece[i], piece[(i + 1) % n]) < -tol), None)
        if reflex is None:
            done.append(piece)
        else:
            pending.extend(_split_at_reflex(piece, reflex, tol))
    raise NumericalFailure(f"凸分解没有收敛: {len(ring)} 个顶点")


def _sort_key(poly: ConvexPolygon) -> tuple[float, float]:
    c = poly.centroid
    return round(c.y, 9), round(c.x, 9)


def wksp_partition(
    workspace: WorkspaceSpec,
    lidar: LidarSpec,
    include_boundary_vertices: bool = True,
    tol: float = TOL,
) -> PartitionResult:
    """
    细分区用全部 N 个激光角，聚合分区只用主激光角

    非凸的面被切成凸块（激光数很少时障碍物顶点处会出现反射角）。
    细分区按重心 (y, x) 升序排列；障碍物内部的面标记为 obstacle-interior。

    Raises:
        NumericalFailure: 细分区面积之和与工作空间面积的相对误差超过 1e-9
    """
    workspace.check()
    started = time.perf_counter()

    fine_segments = generate_partition_segments(workspace, lidar.angles, include_boundary_vertices, tol)
    fine_regions: list[ConvexPolygon] = []
    for ring in _faces(workspace, fine_segments, tol):
        for piece in convex_pieces(ring, tol):
            try:
                fine_regions.append(convex_hull(piece))
            except DegenerateInput:
                logger.warning(f"丢弃退化面: {len(piece)} 个顶点")
    fine_regions.sort(key=_sort_key)

    total = sum(r.area for r in fine_regions)
    if abs(total - workspace.area) > 1e-9 * workspace.area:
        raise NumericalFailure(
            f"细分区面积之和 {total:.12g} 与工作空间面积 {workspace.area:.12g} 不一致")

    kinds: list[RegionKind] = [
        "obstacle-interior" if any(o.contains(r.centroid, tol) for o in workspace.obstacles) else "free"
        for r in fine_regions
    ]

    if sorted(lidar.primary_indices) == list(range(1, lidar.laser_count + 1)):
        agg_segments = fine_segments
    else:
        agg_segments = generate_partition_segments(
            workspace, lidar.primary_angles, include_boundary_vertices, tol)
    cycles = _faces(workspace, agg_segments, tol)
    cycles.sort(key=lambda ring: (round(ring_centroid(ring).y, 9), round(ring_centroid(ring).x, 9)))
    aggregate_regions = [convex_hull(ring) for ring in cycles]

    # 细分区重心严格位于唯一一个聚合面内部
    tree = STRtree([ShapelyPolygon(ring) for ring in cycles])
    fine_to_aggregate: list[int] = []
    for r in fine_regions:
        probe = ShapelyPoint(r.centroid.x, r.centroid.y)
        owners = tree.query(probe, predicate="within")
        fine_to_aggregate.append(int(owners[0]) if len(owners) else int(tree.nearest(probe)))

    logger.info(
        f"划分完成: {len(fine_regions)} 个细分区 ({kinds.count('free')} 个自由), "
        f"{len(aggregate_regions)} 个聚合区, |G|={len(fine_segments)}, "
        f"耗时 {time.perf_counter() - started:.3f}s"
    )
    return PartitionResult(
        workspace=workspace,
        fine_regions=tuple(fine_regions),
        aggregate_regions=tuple(aggregate_regions),
        fine_to_aggregate=tuple(fine_to_aggregate),
        region_kind=tuple(kinds),
        aggregate_cycles=tuple(tuple(ring) for ring in cycles),
        fine_segment_count=len(fine_segments),
        aggregate_segment_count=len(agg_segments),
    )
