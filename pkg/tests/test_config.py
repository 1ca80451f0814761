"""
测试运行配置加载

优先级：显式参数 > 环境变量 NNV_* > 配置文件 > 默认值
"""
from pathlib import Path

import pytest

from src.errors import ParseError
from src.utils.config import get_config

DATA = Path(__file__).resolve().parent.parent / "data"


class TestConfigFile:
    """测试配置文件"""

    def test_defaults(self):
        """测试没有配置文件时的默认值"""
        config = get_config()
        assert config.laser_count == 8
        assert config.epsilon == 1.0
        assert config.skip_unsafe_sources is True
        assert config.sat_backend == "m22"
        assert config.workspace is None

    def test_relative_paths_resolved_against_file(self):
        """测试相对路径按配置文件目录解析"""
        config = get_config(DATA / "run.yaml")
        assert config.workspace == DATA / "workspace_open.json"
        assert config.network == DATA / "centering_net.json"
        assert config.output_dir == DATA / ".." / "out"
        assert config.laser_count == 12
        assert config.smc_time_limit_s == 30

    def test_malformed_yaml(self, tmp_path):
        """测试 YAML 语法错误带行列位置"""
        path = tmp_path / "bad.yaml"
        path.write_text("laser_count: [1, 2\n", encoding="utf-8")
        with pytest.raises(ParseError) as exc:
            get_config(path)
        assert exc.value.location is not None

    def test_not_a_mapping(self, tmp_path):
        """测试顶层不是映射"""
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ParseError):
            get_config(path)

    def test_missing_file(self, tmp_path):
        """测试配置文件不存在"""
        with pytest.raises(ParseError):
            get_config(tmp_path / "nope.yaml")

    def test_invalid_value(self, tmp_path):
        """测试字段取值越界"""
        path = tmp_path / "run.yaml"
        path.write_text("laser_count: 0\n", encoding="utf-8")
        with pytest.raises(ParseError) as exc:
            get_config(path)
        assert exc.value.location == "laser_count"


class TestPrecedence:
    """测试配置来源优先级"""

    def test_env_over_file(self, monkeypatch):
        """测试环境变量覆盖配置文件"""
        monkeypatch.setenv("NNV_LASER_COUNT", "16")
        config = get_config(DATA / "run.yaml")
        assert config.laser_count == 16

    def test_override_over_env(self, monkeypatch):
        """测试显式参数覆盖环境变量，None 值忽略"""
        monkeypatch.setenv("NNV_LASER_COUNT", "16")
        config = get_config(DATA / "run.yaml", laser_count=4, epsilon=None)
        assert config.laser_count == 4
        assert config.epsilon == 1.0

    def test_env_list_value(self, monkeypatch):
        """测试列表型环境变量去重并排序"""
        monkeypatch.setenv("NNV_PRIMARY_LASERS", "[3, 1, 3]")
        assert get_config().primary_lasers == [1, 3]

    def test_log_level_normalized(self):
        """测试日志级别大小写"""
        assert get_config(log_level="debug").log_level == "DEBUG"
        with pytest.raises(ParseError):
            get_config(log_level="loud")


class TestDerived:
    """测试由配置构造的对象"""

    def test_lidar_all_primary_by_default(self):
        """测试未指定主激光时全部激光都是主激光"""
        lidar = get_config(laser_count=6, heading=0.25).lidar()
        assert lidar.primary_indices == (1, 2, 3, 4, 5, 6)
        assert lidar.heading == 0.25

    def test_lidar_primary_out_of_range(self):
        """测试主激光下标超过激光数"""
        config = get_config(laser_count=4, primary_lasers=[5])
        with pytest.raises(ParseError):
            config.lidar()

    def test_primary_must_be_one_based(self):
        """测试主激光下标必须从 1 开始"""
        with pytest.raises(ParseError):
            get_config(primary_lasers=[0, 1])

    def test_budget(self):
        """测试求解预算"""
        budget = get_config(smc_time_limit_s=5, smc_conflict_limit=10).budget()
        assert budget.time_limit_s == 5
        assert budget.conflict_limit == 10

    def test_check_inputs(self, tmp_path):
        """测试缺失或不存在的输入文件"""
        with pytest.raises(ParseError):
            get_config().check_inputs("workspace")
        with pytest.raises(ParseError):
            get_config(workspace=tmp_path / "missing.json").check_inputs("workspace")
        get_config(DATA / "run.yaml").check_inputs("workspace", "network", "dynamics")
