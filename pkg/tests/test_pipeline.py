"""
测试 LangGraph 验证流水线

子命令目标处停止、阶段失败时的路由与执行日志
"""
from pathlib import Path

import pytest

from src.graph.edges import PIPELINE, route_after
from src.main import EXIT_INCOMPLETE, EXIT_INPUT, EXIT_OK, exit_code_for, run_pipeline
from src.utils.config import get_config

DATA = Path(__file__).resolve().parent.parent / "data"


def _phases(state, event="phase_done"):
    return [e["phase"] for e in state["execution_log"] if e["event"] == event]


class TestRouting:
    """测试条件路由"""

    def test_stop_at_target(self):
        """测试到达目标节点时停止"""
        assert route_after("partition")({"target": "partition", "phase": "partition"}) == "stop"
        assert route_after("partition")({"target": "abstract", "phase": "partition"}) == "next"
        assert route_after("fixed_point")({"target": "verify", "phase": "fixed_point"}) == "next"

    def test_stop_on_failure(self):
        """测试阶段失败时停止"""
        assert route_after("preprocess")({"target": "verify", "phase": "failed"}) == "stop"

    def test_pipeline_order(self):
        """测试阶段顺序"""
        assert PIPELINE == ["partition", "preprocess", "abstract", "fixed_point", "report"]


class TestRunPipeline:
    """测试流水线执行"""

    @pytest.mark.asyncio
    async def test_partition_only(self, tmp_path):
        """测试 partition 目标只执行划分"""
        config = get_config(DATA / "run.yaml", output_dir=tmp_path)
        state = await run_pipeline(config, "partition")
        assert state["phase"] == "partition"
        assert _phases(state) == ["partition"]
        assert "network" not in state
        assert len(state["maps"]) == len(state["partition"].free_indices)
        assert set(state["artifacts"]) == {"partition", "partition_svg"}
        assert exit_code_for(state) == EXIT_OK

    @pytest.mark.asyncio
    async def test_abstract_target(self, tmp_path):
        """测试 abstract 目标在不动点之前停止"""
        config = get_config(DATA / "run.yaml", output_dir=tmp_path)
        state = await run_pipeline(config, "abstract")
        assert _phases(state) == ["partition", "preprocess", "abstract"]
        assert _phases(state, "phase_start") == _phases(state)
        assert "fixed_point" not in state
        ts = state["transitions"]
        assert ts.successors(ts.sink) == [ts.sink]
        assert (tmp_path / "abstraction.json").exists()
        assert (tmp_path / "conflicts").is_dir()

    @pytest.mark.asyncio
    async def test_verify(self, tmp_path):
        """测试完整流水线的报告计数与状态一致"""
        config = get_config(DATA / "run.yaml", output_dir=tmp_path)
        state = await run_pipeline(config, "verify")
        assert _phases(state) == PIPELINE
        report = state["report"]
        assert report.safe_states == len(state["fixed_point"].safe) > 0
        assert report.safe_states + report.unsafe_states == report.states
        assert report.free_regions == len(report.regions)
        assert set(report.phase_seconds) == set(PIPELINE[:-1])
        assert exit_code_for(state) == EXIT_OK

    @pytest.mark.asyncio
    async def test_cache_reused(self, tmp_path):
        """测试第二次运行复用冲突缓存且结果相同"""
        config = get_config(DATA / "run.yaml", output_dir=tmp_path)
        first = await run_pipeline(config, "abstract")
        second = await run_pipeline(config, "abstract")
        reused = [e for e in second["execution_log"]
                  if e["event"] == "phase_done" and e["phase"] == "preprocess"][0]["reused"]
        assert reused == len(first["partition"].free_indices)
        assert first["transitions"].transitions == second["transitions"].transitions

    @pytest.mark.asyncio
    async def test_repeat_run_byte_identical(self, tmp_path):
        """测试两次 verify 的划分、抽象与安全集产物逐字节相同"""
        for name in ("a", "b"):
            config = get_config(DATA / "run.yaml", output_dir=tmp_path / name)
            await run_pipeline(config, "verify")
        for artifact in ("partition.json", "abstraction.json", "safe_set.json"):
            assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes()

    @pytest.mark.asyncio
    async def test_missing_network_fails(self, tmp_path):
        """测试缺少网络输入时在 preprocess 阶段失败并返回输入错误"""
        config = get_config(DATA / "run.yaml", output_dir=tmp_path).model_copy(update={"network": None})
        state = await run_pipeline(config, "verify")
        assert state["phase"] == "failed"
        assert state["error_type"] == "ParseError"
        assert _phases(state, "phase_failed") == ["preprocess"]
        assert _phases(state, "phase_start") == ["partition", "preprocess"]
        assert "transitions" not in state
        assert exit_code_for(state) == EXIT_INPUT

    def test_incomplete_exit_code(self):
        """测试存在未完成检查时退出码为 1"""

        class _Ts:
            incomplete_pairs = [(0, "sink:boundary0")]

        assert exit_code_for({"transitions": _Ts()}) == EXIT_INCOMPLETE
