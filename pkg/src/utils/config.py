"""src/utils/config.py — 运行配置加载

优先级（高 → 低）：CLI 参数 > 环境变量 NNV_* / .env > 配置文件 > 默认值。
"""
from __future__ import annotations

from contextvars import ContextVar
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv
from pydantic import Field, ValidationError, field_validator
from pydantic.fields import FieldInfo
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from src.errors import ParseError
from src.utils.jsonio import pydantic_location

load_dotenv()

# 配置文件中的值，通过自定义 source 以最低优先级注入
_FILE_VALUES: ContextVar[dict[str, Any]] = ContextVar("_FILE_VALUES", default={})

_PATH_FIELDS = ("workspace", "network", "dynamics", "output_dir")


class _ConfigFileSource(PydanticBaseSettingsSource):
    """把已解析的 YAML 配置文件当作一个 settings source"""

    def get_field_value(self, field: FieldInfo, field_name: str) -> tuple[Any, str, bool]:
        return _FILE_VALUES.get().get(field_name), field_name, False

    def __call__(self) -> dict[str, Any]:
        return dict(_FILE_VALUES.get())


class RunConfig(BaseSettings):
    """一次验证运行的全部参数"""
    model_config = SettingsConfigDict(env_prefix="NNV_", env_file=".env", extra="ignore")

    # 输入文件
    workspace: Path | None = None
    network: Path | None = None
    dynamics: Path | None = None

    # LiDAR
    laser_count: int = Field(8, ge=1)
    heading: float = 0.0
    primary_lasers: list[int] = []           # 1-based；空 = 全部激光

    # 状态空间离散化
    epsilon: float = Field(1.0, gt=0)

    # 行为开关
    strict_closed: bool = False
    refine_intra: bool = False
    include_boundary_vertices: bool = True
    skip_unsafe_sources: bool = True

    # 数值容差
    lp_tolerance: float = Field(1e-7, gt=0)
    geometry_tolerance: float = Field(1e-9, gt=0)

    # 求解预算
    smc_time_limit_s: float = Field(60.0, gt=0)
    smc_conflict_limit: int = Field(100_000, gt=0)
    sat_backend: str = "m22"
    bench_time_limit_s: float = Field(60.0, gt=0)

    # 执行
    workers: int = Field(1, ge=1)
    output_dir: Path = Path("out")
    seed: int = 0
    log_level: str = "INFO"

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            _ConfigFileSource(settings_cls),
            file_secret_settings,
        )

    @field_validator("primary_lasers")
    @classmethod
    def _check_primary(cls, value: list[int]) -> list[int]:
        if any(i < 1 for i in value):
            raise ValueError("primary_lasers are 1-based laser indices")
        return sorted(set(value))

    @field_validator("log_level")
    @classmethod
    def _check_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR"):
            raise ValueError(f"unknown log level {value!r}")
        return value

    def check_inputs(self, *names: str) -> None:
        """确认指定的输入文件都存在"""
        for name in names:
            path = getattr(self, name)
            if path is None:
                raise ParseError(f"missing required input '{name}'")
            if not Path(path).is_file():
                raise ParseError(f"input file for '{name}' does not exist", path=str(path))

    def lidar(self):
        """由配置构造 LidarSpec"""
        from src.geometry.types import LidarSpec

        primary = self.primary_lasers or list(range(1, self.laser_count + 1))
        try:
            return LidarSpec(laser_count=self.laser_count, heading=self.heading, primary_indices=primary)
        except ValidationError as e:
            raise ParseError(f"invalid LiDAR parameters: {e.errors()[0]['msg']}",
                             location=pydantic_location(e)) from e

    def budget(self):
        """由配置构造单次 SMC 调用的求解预算"""
        from src.budget import SolverBudget

        return SolverBudget(time_limit_s=self.smc_time_limit_s, conflict_limit=self.smc_conflict_limit)


def _read_config_file(path: Path) -> dict[str, Any]:
    """读取 YAML/JSON 配置文件，相对路径按配置文件所在目录解析"""
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except OSError as e:
        raise ParseError(f"cannot read config: {e.strerror}", path=str(path)) from e
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        location = f"line {mark.line + 1}, column {mark.column + 1}" if mark else None
        raise ParseError("malformed config file", path=str(path), location=location) from e
    if not isinstance(data, dict):
        raise ParseError("config file must contain a mapping", path=str(path))

    for key in _PATH_FIELDS:
        if data.get(key) is not None:
            p = Path(data[key])
            data[key] = p if p.is_absolute() else (path.parent / p)
    return data


def get_config(config_file: str | Path | None = None, **overrides: Any) -> RunConfig:
    """
    加载运行配置

    Args:
        config_file: 可选的 YAML/JSON 配置文件
        **overrides: CLI 显式给出的参数（值为 None 的项忽略）
    """
    file_values = _read_config_file(Path(config_file)) if config_file else {}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    token = _FILE_VALUES.set(file_values)
    try:
        return RunConfig(**overrides)
    except ValidationError as e:
        raise ParseError(f"invalid configuration: {e.errors()[0]['msg']}",
                         path=str(config_file) if config_file else None,
                         location=pydantic_location(e)) from e
    finally:
        _FILE_VALUES.reset(token)
