"""src/smc/cache.py — 区域冲突缓存（每个区域一个 JSON 文件）

子句为 DIMACS 风格符号整数：变量编号 = 全局 ReLU 编号，符号 = 相位。
fingerprint 绑定区域多边形、成像映射与网络权重；不匹配的缓存不会被复用。
"""
from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Any

from src.smc.types import Conflict, PreprocessResult
from src.utils.jsonio import dump_json, dumps, load_json

CONFLICT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["region", "clauses"],
    "properties": {
        "format_version": {"type": "integer"},
        "region": {"type": "integer", "minimum": 0},
        "fingerprint": {"type": "string"},
        "clauses": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}, "minItems": 1}},
        "feasible_phases": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "lp_calls": {"type": "integer"},
        "censored": {"type": "boolean"},
    },
}


def fingerprint(*parts: Any) -> str:
    """任意可序列化内容的 sha256"""
    return hashlib.sha256(dumps(list(parts))).hexdigest()


def conflict_path(directory: str | Path, region: int) -> Path:
    return Path(directory) / f"region_{region:05d}.json"


def save_conflicts(directory: str | Path, region: int, result: PreprocessResult, key: str = "") -> Path:
    payload = {
        "region": region,
        "fingerprint": key,
        "clauses": [list(c.clause) for c in result.conflicts],
        "feasible_phases": [[int(b) for b in phase] for phase in result.feasible_phases],
        "lp_calls": result.lp_calls,
        "censored": result.censored,
    }
    return dump_json(conflict_path(directory, region), payload)


def _result(data: dict[str, Any]) -> PreprocessResult:
    return PreprocessResult(
        feasible_phases=[tuple(bool(b) for b in phase) for phase in data.get("feasible_phases", [])],
        conflicts=[Conflict(literals=tuple(-l for l in clause)) for clause in data["clauses"]],
        lp_calls=int(data.get("lp_calls", 0)),
        censored=bool(data.get("censored", False)),
    )


def load_conflicts(path: str | Path) -> tuple[int, list[Conflict]]:
    """读取一个缓存文件，返回 (区域下标, 冲突列表)"""
    data = load_json(path, schema=CONFLICT_SCHEMA)
    return int(data["region"]), _result(data).conflicts


def load_conflict_dir(directory: str | Path) -> dict[int, list[Conflict]]:
    """读取目录下全部缓存；目录不存在时返回空表"""
    directory = Path(directory)
    if not directory.is_dir():
        return {}
    out: dict[int, list[Conflict]] = {}
    for path in sorted(directory.glob("region_*.json")):
        region, conflicts = load_conflicts(path)
        out[region] = conflicts
    return out


def load_cached_result(directory: str | Path, region: int, key: str) -> PreprocessResult | None:
    """fingerprint 一致时返回缓存的预处理结果，否则 None"""
    path = conflict_path(directory, region)
    if not path.is_file():
        return None
    data = load_json(path, schema=CONFLICT_SCHEMA)
    if data.get("fingerprint") != key or int(data["region"]) != region:
        return None
    return _result(data)
