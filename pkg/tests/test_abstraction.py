"""
测试抽象模块

状态空间、初始不安全集、转移计算、不动点、安全集、闭环仿真与端到端可靠性
"""
from pathlib import Path

import numpy as np
import pytest
from shapely.geometry import Polygon

from src.abstraction.fixed_point import SafeSet, safe_set, unsafe_fixed_point
from src.abstraction.io import abstraction_to_dict, load_dynamics, load_safe_set, save_dynamics, save_safe_set
from src.abstraction.simulate import sample_safe_starts, simulate, simulate_batch
from src.abstraction.states import build_states, initial_unsafe, unsafe_regions
from src.abstraction.transitions import TransitionOptions, compute_transitions
from src.abstraction.types import AbstractState, Dynamics, StateBounds, TransitionSystem
from src.budget import create_budget
from src.errors import DimensionMismatch, NonDivisibleBounds
from src.geometry.io import load_workspace
from src.geometry.partition import wksp_partition
from src.geometry.types import LidarSpec, WorkspaceSpec
from src.imaging.maps import partition_imaging_maps
from src.imaging.oracle import lidar_images_batch
from src.network.io import load_network
from src.network.model import NeuralNetwork, controller
from src.smc.solver import preprocess_region

DATA = Path(__file__).resolve().parent.parent / "data"


def _block_workspace():
    return WorkspaceSpec(
        boundary={"vertices": [[0, 0], [4, 0], [4, 4], [0, 4]]},
        obstacles=[{"vertices": [[1, 1], [2, 1], [2, 2], [1, 2]]}],
    )


def _constant_net(ux, uy=0.0, laser_count=4):
    """恒定输出 (ux, uy) 的单隐层网络"""
    return NeuralNetwork.from_layers([
        (np.zeros((2, 2 * laser_count)), np.array([1.0, -1.0])),
        (np.array([[ux, 0.0], [uy, 0.0]]), np.zeros(2)),
    ])


def _chain(transitions, unsafe0):
    """手工构造的转移系统；最后一个下标为汇点"""
    n = len(transitions) - 1
    return TransitionSystem(
        states=[AbstractState(i, ()) for i in range(n)],
        aggregates=[list(range(n))],
        state_aggregate=[0] * n,
        transitions=transitions,
        unsafe0=unsafe0,
    )


class TestStateSpace:
    """测试状态空间划分"""

    def setup_method(self):
        self.partition = wksp_partition(_block_workspace(), LidarSpec(laser_count=4))

    def test_planar_count(self):
        """测试没有辅助维时每个区域一个状态"""
        space = build_states(self.partition, StateBounds())
        assert len(space.states) == 9
        assert len(space.aggregates) == 9

    def test_aux_dimension_count(self):
        """测试 n=3, [0,1], ε=0.5 时每个区域两个状态"""
        space = build_states(self.partition, StateBounds(lower=(0.0,), upper=(1.0,), epsilon=0.5))
        assert len(space.states) == 18
        assert space.cell(1).box == ((0.5, 1.0),)

    def test_single_cell_per_dim(self):
        """测试 ε 等于区间长度"""
        space = build_states(self.partition, StateBounds(lower=(-2.0,), upper=(2.0,), epsilon=4.0))
        assert len(space.states) == 9

    def test_non_divisible(self):
        """测试区间长度不是 ε 的整数倍"""
        with pytest.raises(NonDivisibleBounds):
            StateBounds(lower=(0.0,), upper=(1.0,), epsilon=0.3)

    def test_index_bijection(self):
        """测试状态 ↔ 下标 ↔ 单元是双射"""
        space = build_states(self.partition, StateBounds(lower=(0.0, 0.0), upper=(1.0, 2.0), epsilon=0.5))
        assert len(space.states) == 9 * 2 * 4
        for s, state in enumerate(space.states):
            assert space.index(state) == s
            cell = space.cell(s)
            center = np.array([*cell.region.centroid, *[(lo + hi) / 2 for lo, hi in cell.box]])
            assert space.states_containing(center) == [s]

    def test_boundary_point_in_two_cells(self):
        """测试辅助维网格点属于相邻两个小区间，越界不属于任何小区间"""
        bounds = StateBounds(lower=(0.0,), upper=(1.0,), epsilon=0.25)
        assert bounds.cells_containing(0, 0.5) == [1, 2]
        assert bounds.cells_containing(0, 0.6) == [2]
        assert bounds.cells_containing(0, 1.0) == [3]
        assert bounds.cells_containing(0, 1.5) == []
        space = build_states(self.partition, bounds)
        x = np.array([0.5, 0.5, 0.5])
        assert space.states_containing(x) == [space.index(AbstractState(0, (1,))), space.index(AbstractState(0, (2,)))]

    def test_aggregate_membership(self):
        """测试聚合成员与 fine_to_aggregate 一致"""
        partition = wksp_partition(_block_workspace(), LidarSpec(laser_count=4, primary_indices=[1]))
        space = build_states(partition, StateBounds())
        for a, members in enumerate(space.aggregates):
            for s in members:
                assert partition.fine_to_aggregate[space.states[s].region] == a
        assert sorted(s for m in space.aggregates for s in m) == list(range(len(space.states)))


class TestInitialUnsafe:
    """测试初始不安全集"""

    def test_block_example_all_unsafe(self):
        """测试 3×3 例子中每个自由区域都贴着外墙"""
        partition = wksp_partition(_block_workspace(), LidarSpec(laser_count=4))
        space = build_states(partition, StateBounds())
        assert initial_unsafe(space) == list(range(9))
        assert initial_unsafe(space, strict_closed=True) == list(range(9))

    def test_interior_region_excluded(self):
        """测试不接触 ∂W 与障碍物的内部区域不在 F⁰ 中"""
        partition = wksp_partition(load_workspace(DATA / "workspace_open.json"), LidarSpec(laser_count=12))
        center = partition.region_of((2.0, 2.0))
        assert center not in unsafe_regions(partition)
        assert center not in unsafe_regions(partition, strict_closed=True)

    def test_open_workspace_boundary_rule(self):
        """测试无障碍物时默认规则只标记有边落在 ∂W 上的区域"""
        workspace = load_workspace(DATA / "workspace_open.json")
        partition = wksp_partition(workspace, LidarSpec(laser_count=12))
        outer = Polygon(workspace.boundary.to_list()).exterior
        unsafe = set(unsafe_regions(partition))
        assert 0 < len(unsafe) < len(partition.fine_regions)
        for i, region in enumerate(partition.fine_regions):
            overlap = outer.intersection(Polygon(region.to_list()).exterior).length
            assert (i in unsafe) == (overlap > 1e-9)

    def test_strict_rule_is_superset(self):
        """测试严格规则标记的区域包含默认规则的区域"""
        partition = wksp_partition(_block_workspace(), LidarSpec(laser_count=8, heading=0.1))
        assert set(unsafe_regions(partition)) <= set(unsafe_regions(partition, strict_closed=True))


class TestFixedPoint:
    """测试不安全集不动点"""

    def test_chain(self):
        """测试 s0 → s1 → s2，F⁰ = {s2}"""
        ts = _chain({0: [1], 1: [2], 2: [2], 3: [3]}, [2, 3])
        fp = unsafe_fixed_point(ts)
        assert fp.unsafe == [0, 1, 2]
        assert fp.safe == []

    def test_unreachable(self):
        """测试只有自环的状态保持安全"""
        ts = _chain({0: [0], 1: [2], 2: [2], 3: [3]}, [2, 3])
        fp = unsafe_fixed_point(ts)
        assert fp.safe == [0]
        assert fp.unsafe == [1, 2]

    def test_sink_always_unsafe(self):
        """测试能到达汇点的状态不安全"""
        ts = _chain({0: [0, 2], 1: [1], 2: [2]}, [])
        fp = unsafe_fixed_point(ts)
        assert fp.unsafe == [0]
        assert fp.safe == [1]

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_backward_bfs(self, seed):
        """测试随机图上与反向 BFS 一致，且结果是不动点"""
        rng = np.random.default_rng(seed)
        n = 30
        transitions = {s: sorted(set(rng.choice(n + 1, size=rng.integers(1, 4)).tolist())) for s in range(n)}
        transitions[n] = [n]
        unsafe0 = sorted(set(rng.choice(n, size=3).tolist()) | {n})
        ts = _chain(transitions, unsafe0)

        reverse = {t: [s for s in transitions if t in transitions[s]] for t in range(n + 1)}
        seen, queue = set(unsafe0), list(unsafe0)
        while queue:
            t = queue.pop()
            for s in reverse[t]:
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
        seen.discard(n)

        fp = unsafe_fixed_point(ts)
        assert fp.unsafe == sorted(seen)
        assert fp.safe == sorted(set(range(n)) - seen)

        again = unsafe_fixed_point(ts.model_copy(update={"unsafe0": fp.unsafe + [n]}))
        assert again == fp


class TestSafeSet:
    """测试安全集"""

    def setup_method(self):
        self.partition = wksp_partition(_block_workspace(), LidarSpec(laser_count=4))
        self.space = build_states(self.partition, StateBounds(lower=(0.0,), upper=(1.0,), epsilon=0.5))

    def test_empty(self):
        """测试 F_safe 为空"""
        result = safe_set([], self.space)
        assert result.is_empty
        assert len(result) == 0
        assert result.volume == 0.0

    def test_all_free_states(self):
        """测试全部自由状态的安全集体积为自由面积 × 辅助维长度"""
        free = [s for s in range(len(self.space.states)) if self.space.region_kind(s) == "free"]
        result = safe_set(free, self.space)
        assert result.volume == pytest.approx(15.0)
        for c in result.cells:
            x = np.array([*c.cell.region.centroid, sum(c.cell.box[0]) / 2])
            assert result.contains(x)
        assert not result.contains(np.array([1.5, 1.5, 0.5]))

    def test_file_round_trip(self, tmp_path):
        """测试安全集文件读写"""
        result = safe_set([0, 3, 5], self.space)
        loaded = load_safe_set(save_safe_set(result, tmp_path / "safe_set.json"))
        assert [c.state for c in loaded.cells] == [0, 3, 5]
        assert loaded.volume == pytest.approx(result.volume)


class TestTransitions:
    """测试转移关系计算"""

    def setup_method(self):
        self.workspace = _block_workspace()
        self.lidar = LidarSpec(laser_count=4)
        self.partition = wksp_partition(self.workspace, self.lidar)
        self.maps = partition_imaging_maps(self.partition, self.lidar)
        self.space = build_states(self.partition, StateBounds())
        self.dyn = Dynamics.from_lists(np.eye(2), np.eye(2))
        self.all_sources = TransitionOptions(skip_unsafe_sources=False)

    def _shapes(self):
        return [Polygon(r.to_list()) for r in self.partition.fine_regions]

    def test_stationary_network(self):
        """测试 u = 0 时后继恰为闭包相交的区域（含自身），贴边区域可到达汇点"""
        options = TransitionOptions(skip_unsafe_sources=False, refine_intra=True)
        ts = compute_transitions(self.space, self.dyn, _constant_net(0.0), self.maps, options=options)
        shapes = self._shapes()
        outer = Polygon(self.workspace.boundary.to_list()).exterior
        for s in self.partition.free_indices:
            expected = [t for t in range(len(shapes)) if shapes[s].intersects(shapes[t])]
            if shapes[s].exterior.intersects(outer):
                expected.append(ts.sink)
            assert ts.successors(s) == expected
        assert ts.incomplete_pairs == []

    def test_obstacle_source_keeps_complete_row(self):
        """测试障碍物内部状态不作为源，保留完整转移"""
        ts = compute_transitions(self.space, self.dyn, _constant_net(0.0), self.maps, options=self.all_sources)
        assert ts.successors(4) == list(range(ts.sink + 1))
        assert ts.successors(ts.sink) == [ts.sink]
        assert ts.unsafe0 == list(range(ts.sink + 1))

    def test_push_removes_left_targets(self):
        """测试 u = (0.6, 0) 时不会转移到源左侧的区域"""
        ts = compute_transitions(self.space, self.dyn, _constant_net(0.6), self.maps, options=self.all_sources)
        for s in self.partition.free_indices:
            src_min_x = self.partition.fine_regions[s].bbox[0]
            for t in ts.successors(s):
                if t == ts.sink:
                    continue
                assert self.partition.fine_regions[t].bbox[2] >= src_min_x + 0.6 - 1e-9

    def test_preloaded_conflicts_same_result(self):
        """测试预加载区域冲突后 δ_F 不变"""
        rng = np.random.default_rng(4)
        net = NeuralNetwork.from_layers([
            (rng.normal(scale=0.3, size=(3, 8)), rng.normal(scale=0.3, size=3)),
            (rng.normal(scale=0.5, size=(2, 3)), rng.normal(scale=0.3, size=2)),
        ])
        conflicts = {
            r: preprocess_region(self.space.cell(r), self.maps[r], net).conflicts
            for r in self.partition.free_indices
        }
        plain = compute_transitions(self.space, self.dyn, net, self.maps, options=self.all_sources)
        primed = compute_transitions(self.space, self.dyn, net, self.maps, conflicts, options=self.all_sources)
        assert plain.transitions == primed.transitions

    def test_aggregate_pruning_is_conservative(self):
        """测试聚合剪枝得到的 δ_F 包含逐对细化的 δ_F"""
        lidar = LidarSpec(laser_count=4, primary_indices=[1])
        partition = wksp_partition(self.workspace, lidar)
        space = build_states(partition, StateBounds())
        maps = partition_imaging_maps(partition, lidar)
        net = _constant_net(0.3, 0.2)
        coarse = compute_transitions(space, self.dyn, net, maps, options=self.all_sources)
        fine = compute_transitions(space, self.dyn, net, maps,
                                   options=TransitionOptions(skip_unsafe_sources=False, refine_intra=True))
        for s in coarse.transitions:
            assert set(fine.successors(s)) <= set(coarse.successors(s))

    def test_resource_limit_keeps_transition(self):
        """测试超预算的检查保留转移并记入 incomplete"""
        net = _constant_net(10.0)
        options = TransitionOptions(skip_unsafe_sources=False, budget=create_budget(conflict_limit=1))
        ts = compute_transitions(self.space, self.dyn, net, self.maps, options=options)
        assert ts.incomplete_pairs
        assert ts.successors(0) == list(range(ts.sink + 1))
        assert {s for s, _ in ts.incomplete_pairs} <= set(self.partition.free_indices)

    def test_concrete_successors_covered(self):
        """测试具体后继总落在某个抽象后继里（越界时汇点在后继中）"""
        rng = np.random.default_rng(12)
        net = NeuralNetwork.from_layers([
            (rng.normal(scale=0.2, size=(4, 8)), rng.normal(scale=0.2, size=4)),
            (rng.normal(scale=0.4, size=(2, 4)), rng.normal(scale=0.2, size=2)),
        ])
        ts = compute_transitions(self.space, self.dyn, net, self.maps, options=self.all_sources)
        for s in self.partition.free_indices:
            verts = np.array(self.partition.fine_regions[s].to_list())
            points = rng.dirichlet(np.ones(len(verts)), size=300) @ verts
            U = controller(net, lidar_images_batch(points, self.workspace, self.lidar))
            successors = set(ts.successors(s))
            for x_next in self.dyn.step(points, U):
                hits = self.space.states_containing(x_next)
                if hits:
                    assert successors & set(hits)
                else:
                    assert ts.sink in successors

    def test_skip_unsafe_sources(self):
        """测试默认不细化初始不安全的源状态"""
        ts = compute_transitions(self.space, self.dyn, _constant_net(0.0), self.maps)
        assert ts.smc_calls == 0
        assert all(ts.successors(s) == list(range(ts.sink + 1)) for s in range(ts.sink))

    def test_export(self):
        """测试抽象导出"""
        ts = compute_transitions(self.space, self.dyn, _constant_net(0.0), self.maps)
        fp = unsafe_fixed_point(ts)
        data = abstraction_to_dict(ts, fp)
        assert data["sink"] == 9
        assert data["counts"]["states"] == 9
        assert len(data["transitions"]) == ts.transition_count()
        assert data["safe"] == []


class TestSimulate:
    """测试闭环仿真"""

    def setup_method(self):
        self.workspace = _block_workspace()
        self.lidar = LidarSpec(laser_count=4)
        self.dyn = Dynamics.from_lists(np.eye(2), np.eye(2))

    def test_zero_network_stationary(self):
        """测试零控制时轨迹静止且安全"""
        result = simulate(self.dyn, _constant_net(0.0), self.workspace, self.lidar, [0.5, 0.5], 20)
        assert result.safe
        assert result.trajectory.shape == (21, 2)
        np.testing.assert_array_equal(result.trajectory[-1], [0.5, 0.5])

    def test_push_into_obstacle(self):
        """测试距障碍物 0.5 m、步长 0.25 时在 t=2 碰撞"""
        result = simulate(self.dyn, _constant_net(0.25), self.workspace, self.lidar, [0.5, 1.5], 10)
        assert not result.safe
        assert result.violation_step == 2
        assert result.reason == "obstacle"

    def test_push_through_wall(self):
        """测试越过外墙"""
        result = simulate(self.dyn, _constant_net(0.25), self.workspace, self.lidar, [3.5, 0.5], 10)
        assert result.violation_step == 2
        assert result.reason == "boundary"

    def test_state_bounds(self):
        """测试辅助维越界被记录而不抛异常"""
        dyn = Dynamics.from_lists(np.eye(3), [[0, 0], [0, 0], [1, 0]])
        bounds = StateBounds(lower=(0.0,), upper=(1.0,), epsilon=0.5)
        result = simulate(dyn, _constant_net(0.25), self.workspace, self.lidar, [0.5, 0.5, 0.6], 10, bounds)
        assert result.violation_step == 2
        assert result.reason == "state_bounds"

    def test_batch_agrees_with_single(self):
        """测试批量仿真与逐条仿真的违规时刻和原因一致"""
        rng = np.random.default_rng(8)
        net = NeuralNetwork.from_layers([
            (rng.normal(scale=0.1, size=(4, 8)), rng.normal(scale=0.1, size=4)),
            (rng.normal(scale=0.3, size=(2, 4)), rng.normal(scale=0.1, size=2)),
        ])
        starts = rng.uniform(0.1, 3.9, size=(60, 2))
        batch = simulate_batch(self.dyn, net, self.workspace, self.lidar, starts, 15)
        for k, x0 in enumerate(starts):
            single = simulate(self.dyn, net, self.workspace, self.lidar, x0, 15)
            assert bool(batch.safe[k]) == single.safe
            if not single.safe:
                assert batch.violation_step[k] == single.violation_step
                assert batch.reason[k] == single.reason
        assert batch.unsafe_count == int((~batch.safe).sum())

    def test_sample_inside_safe_set(self):
        """测试采样点都落在安全集内"""
        partition = wksp_partition(self.workspace, LidarSpec(laser_count=8, heading=0.1))
        space = build_states(partition, StateBounds(lower=(0.0,), upper=(2.0,), epsilon=1.0))
        free = [s for s in range(len(space.states)) if space.region_kind(s) == "free"]
        safe = safe_set(free[:7], space)
        points = sample_safe_starts(safe, 300, np.random.default_rng(0))
        assert points.shape == (300, 3)
        assert all(safe.contains(p) for p in points)

    def test_sample_empty(self):
        """测试空安全集不采样"""
        assert sample_safe_starts(SafeSet(), 5, np.random.default_rng(0)).shape[0] == 0


class TestDynamicsIO:
    """测试动力学文件"""

    def test_load_fixture(self):
        """测试示例动力学"""
        dyn, bounds = load_dynamics(DATA / "dynamics_planar.json")
        assert dyn.n == 2 and dyn.m == 2
        assert bounds.aux_dims == 0

    def test_round_trip(self, tmp_path):
        """测试带辅助维的读写"""
        dyn = Dynamics.from_lists(np.eye(3), np.ones((3, 2)))
        bounds = StateBounds(lower=(-1.0,), upper=(1.0,), epsilon=0.5)
        loaded, loaded_bounds = load_dynamics(save_dynamics(dyn, bounds, tmp_path / "dyn.json"), epsilon=0.5)
        np.testing.assert_array_equal(loaded.B, dyn.B)
        assert loaded_bounds.cells_per_dim == (4,)

    def test_aux_bound_count_mismatch(self, tmp_path):
        """测试辅助维界个数与 n − 2 不符"""
        path = tmp_path / "dyn.json"
        path.write_text('{"A": [[1, 0], [0, 1]], "B": [[1], [1]], "aux_lower": [0], "aux_upper": [1]}',
                        encoding="utf-8")
        with pytest.raises(DimensionMismatch):
            load_dynamics(path)

    def test_non_square_a(self):
        """测试 A 不是方阵"""
        with pytest.raises(DimensionMismatch):
            Dynamics.from_lists([[1, 0, 0], [0, 1, 0]], [[1], [1]])


class TestEndToEnd:
    """测试完整流程：X_safe 中出发的轨迹全部安全"""

    def test_centering_controller(self):
        """测试向中心收缩的控制器得到非空安全集且 1000 条随机轨迹无一违规"""
        workspace = load_workspace(DATA / "workspace_open.json")
        net = load_network(DATA / "centering_net.json")
        dyn, bounds = load_dynamics(DATA / "dynamics_planar.json")
        lidar = LidarSpec(laser_count=12)

        partition = wksp_partition(workspace, lidar)
        maps = partition_imaging_maps(partition, lidar)
        space = build_states(partition, bounds)
        ts = compute_transitions(space, dyn, net, maps, unsafe0=initial_unsafe(space))
        fp = unsafe_fixed_point(ts)
        result = safe_set(fp.safe, space)

        assert not result.is_empty
        assert partition.region_of((2.0, 2.0)) in fp.safe
        assert ts.incomplete_pairs == []

        starts = sample_safe_starts(result, 1000, np.random.default_rng(1))
        batch = simulate_batch(dyn, net, workspace, lidar, starts, 50, bounds)
        assert batch.unsafe_count == 0
