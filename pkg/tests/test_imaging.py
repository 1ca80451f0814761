"""
测试成像模块

区域内仿射 LiDAR 映射与暴力射线投射真值的一致性
"""
import itertools
import math

import numpy as np
import pytest
from shapely.geometry import Polygon

from src.errors import NotImagingAdapted, OutOfRegion
from src.geometry.partition import wksp_partition
from src.geometry.raycast import first_hit
from src.geometry.types import EdgeId, LidarSpec, Point2, WorkspaceSpec
from src.imaging.maps import (
    hit_edge_for_region,
    lidar_image_affine,
    partition_imaging_maps,
    region_imaging_maps,
)
from src.imaging.oracle import lidar_image_bruteforce, lidar_images_batch

SQUARE4 = [[0, 0], [4, 0], [4, 4], [0, 4]]
BLOCK = [[1, 1], [2, 1], [2, 2], [1, 2]]
TRIANGLE = [[2.5, 0.5], [3.5, 0.5], [2.5, 1.5]]


def _workspace(obstacles=()):
    return WorkspaceSpec(
        boundary={"vertices": SQUARE4},
        obstacles=[{"vertices": o} for o in obstacles],
    )


def _interior_samples(region, rng, count):
    """区域内的随机凸组合点"""
    verts = np.array(region.to_list())
    weights = rng.dirichlet(np.ones(len(verts)), size=count)
    return weights @ verts


class TestHitEdge:
    """测试区域击中边"""

    def setup_method(self):
        self.workspace = _workspace([BLOCK])
        self.lidar = LidarSpec(laser_count=4)
        self.partition = wksp_partition(self.workspace, self.lidar)

    def test_left_of_obstacle(self):
        """测试障碍物左侧区域的 0° 激光击中障碍物左边"""
        region = self.partition.fine_regions[3]
        edge = hit_edge_for_region(region, 0.0, self.workspace)
        assert edge.source == EdgeId(1, 3)
        assert {tuple(edge.a), tuple(edge.b)} == {(1.0, 1.0), (1.0, 2.0)}

    def test_corner_region_right(self):
        """测试左下角区域的 0° 激光击中右边界的子段"""
        region = self.partition.fine_regions[0]
        edge = hit_edge_for_region(region, 0.0, self.workspace)
        assert edge.source == EdgeId(0, 1)
        assert {tuple(edge.a), tuple(edge.b)} == {(4.0, 0.0), (4.0, 1.0)}

    def test_corner_region_down(self):
        """测试左下角区域的 270° 激光击中底边的子段"""
        region = self.partition.fine_regions[0]
        edge = hit_edge_for_region(region, 3 * math.pi / 2, self.workspace)
        assert edge.source == EdgeId(0, 0)
        assert {tuple(edge.a), tuple(edge.b)} == {(0.0, 0.0), (1.0, 0.0)}

    def test_not_imaging_adapted(self):
        """测试整个工作空间不是成像自适应区域"""
        with pytest.raises(NotImagingAdapted):
            hit_edge_for_region(self.workspace.boundary, math.pi, self.workspace)


class TestAffineMap:
    """测试仿射成像映射"""

    def setup_method(self):
        self.workspace = _workspace([BLOCK])
        self.lidar = LidarSpec(laser_count=4)
        self.partition = wksp_partition(self.workspace, self.lidar)
        self.maps = partition_imaging_maps(self.partition, self.lidar)

    def test_map_coefficients(self):
        """测试 d = (1 − x, 0)"""
        m = self.maps[3]
        np.testing.assert_allclose(m.P[0], [[-1.0, 0.0], [0.0, 0.0]], atol=1e-12)
        np.testing.assert_allclose(m.Q[0], [1.0, 0.0], atol=1e-12)

    def test_map_downward_onto_obstacle_top(self):
        """测试障碍物上方区域的 270° 激光：d = (0, 2 − y)"""
        region = next(i for i in self.partition.free_indices
                      if self.partition.fine_regions[i].contains((1.5, 3.0)))
        m = self.maps[region]
        np.testing.assert_allclose(m.P[3], [[0.0, 0.0], [0.0, -1.0]], atol=1e-12)
        np.testing.assert_allclose(m.Q[3], [0.0, 2.0], atol=1e-12)

    def test_image_at_corner_position(self):
        """测试 (0.5, 0.5) 处的图像"""
        d = lidar_image_affine((0.5, 0.5), self.maps[0])
        np.testing.assert_allclose(d, [3.5, 0, 0, 3.5, -0.5, 0, 0, -0.5], atol=1e-12)

    def test_image_left_of_obstacle(self):
        """测试 (0.5, 1.5) 处的图像"""
        d = lidar_image_affine((0.5, 1.5), self.maps[3])
        np.testing.assert_allclose(d, [0.5, 0, 0, 2.5, -0.5, 0, 0, -0.5], atol=1e-12)

    def test_out_of_region(self):
        """测试区域外的位置"""
        with pytest.raises(OutOfRegion):
            lidar_image_affine((3.0, 3.0), self.maps[0])

    def test_obstacle_region_has_no_map(self):
        """测试障碍物内部区域不建立映射"""
        assert 4 not in self.maps
        assert sorted(self.maps) == self.partition.free_indices


class TestAgainstBruteForce:
    """测试仿射映射与暴力射线投射一致"""

    @pytest.mark.parametrize("laser_count,heading", [(4, 0.0), (8, 0.0), (8, 0.1), (12, 0.3)])
    def test_all_regions(self, laser_count, heading):
        """测试每个自由区域内 100 个随机点（含 45° 激光打在三角形斜边上）"""
        workspace = _workspace([BLOCK, TRIANGLE])
        lidar = LidarSpec(laser_count=laser_count, heading=heading)
        partition = wksp_partition(workspace, lidar)
        rng = np.random.default_rng(laser_count)
        for i in partition.free_indices:
            maps = region_imaging_maps(partition.fine_regions[i], lidar, workspace)
            points = _interior_samples(partition.fine_regions[i], rng, 100)
            affine = (np.einsum("nij,kj->kni", maps.P, points) + maps.Q[None, :, :]).reshape(len(points), -1)
            np.testing.assert_allclose(affine, lidar_images_batch(points, workspace, lidar), atol=1e-9)
            for p in points[:5]:
                expected = lidar_image_bruteforce(p, workspace, lidar)
                np.testing.assert_allclose(lidar_image_affine(p, maps), expected, atol=1e-9)


class TestContinuity:
    """测试相邻区域公共边两侧的成像连续性"""

    @pytest.mark.parametrize("laser_count,heading", [(8, 0.1), (12, 0.3)])
    def test_shared_edge(self, laser_count, heading):
        """测试公共边中点两侧 ±1e-7 处，击中同一条边的激光图像相差 ≤ 1e-5"""
        workspace = _workspace([BLOCK, TRIANGLE])
        lidar = LidarSpec(laser_count=laser_count, heading=heading)
        partition = wksp_partition(workspace, lidar)
        maps = partition_imaging_maps(partition, lidar)
        shapes = {i: Polygon(partition.fine_regions[i].to_list()) for i in maps}

        compared = 0
        for i, j in itertools.combinations(sorted(maps), 2):
            shared = shapes[i].intersection(shapes[j])
            if shared.geom_type != "LineString" or shared.length < 1e-6:
                continue
            (ax, ay), (bx, by) = shared.coords[0], shared.coords[-1]
            mid = np.array([(ax + bx) / 2, (ay + by) / 2])
            normal = np.array([ay - by, bx - ax]) / math.hypot(bx - ax, by - ay)
            if not partition.fine_regions[i].contains(Point2(*(mid + 1e-7 * normal)), 0.0):
                normal = -normal
            inside_i, inside_j = mid + 1e-7 * normal, mid - 1e-7 * normal
            di = maps[i].P @ inside_i + maps[i].Q
            dj = maps[j].P @ inside_j + maps[j].Q
            for k in range(lidar.laser_count):
                if maps[i].edges[k].source == maps[j].edges[k].source:
                    assert np.linalg.norm(di[k] - dj[k]) <= 1e-5
                    compared += 1
        assert compared > 0


class TestBruteForce:
    """测试暴力射线投射"""

    def test_centered_square(self):
        """测试空工作空间中心"""
        d = lidar_image_bruteforce((2.0, 2.0), _workspace(), LidarSpec(laser_count=4))
        np.testing.assert_allclose(d, [2, 0, 0, 2, -2, 0, 0, -2], atol=1e-12)

    def test_offset_position(self):
        """测试偏离中心"""
        d = lidar_image_bruteforce((1.0, 2.0), _workspace(), LidarSpec(laser_count=4))
        np.testing.assert_allclose(d, [3, 0, 0, 2, -1, 0, 0, -2], atol=1e-12)

    def test_directions(self):
        """测试每束激光的方向与 θ_i 一致"""
        lidar = LidarSpec(laser_count=7, heading=0.2)
        d = lidar_image_bruteforce((0.7, 3.1), _workspace([BLOCK]), lidar).reshape(-1, 2)
        for vec, angle in zip(d, lidar.angles):
            r = np.linalg.norm(vec)
            assert r > 0
            np.testing.assert_allclose(vec / r, [math.cos(angle), math.sin(angle)], atol=1e-12)

    def test_batch_matches_single(self):
        """测试向量化批量结果与逐点结果一致"""
        workspace = _workspace([BLOCK, TRIANGLE])
        lidar = LidarSpec(laser_count=8, heading=0.1)
        rng = np.random.default_rng(5)
        points = rng.uniform(0.05, 3.95, size=(200, 2))
        points = np.array([p for p in points if workspace.in_free_space(p)])
        batch = lidar_images_batch(points, workspace, lidar, chunk=64)
        for p, row in zip(points, batch):
            np.testing.assert_allclose(row, lidar_image_bruteforce(p, workspace, lidar), atol=1e-9)

    def test_first_hit_agrees_with_image(self):
        """测试图像终点落在击中边上"""
        workspace = _workspace([BLOCK])
        lidar = LidarSpec(laser_count=4)
        d = lidar_image_bruteforce((0.5, 1.5), workspace, lidar)
        hit = first_hit((0.5, 1.5), 0.0, workspace)
        assert (0.5 + d[0], 1.5 + d[1]) == pytest.approx(tuple(hit.point))
