"""src/utils/jsonio.py — JSON 产物读写

写出统一用 orjson（键排序 + 缩进），保证同一配置重复运行得到逐字节相同的文件；
读入时先用 jsonschema 校验，再交给 pydantic 模型。
"""
from __future__ import annotations

from pathlib import Path
from typing import Any

import jsonschema
import orjson

from src.errors import ParseError

FORMAT_VERSION = 1

_DUMP_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def dumps(payload: Any) -> bytes:
    """序列化为确定性的 JSON 字节串"""
    return orjson.dumps(payload, option=_DUMP_OPTIONS)


def dump_json(path: str | Path, payload: dict[str, Any], versioned: bool = True) -> Path:
    """写出 JSON 产物；versioned=True 时自动补 format_version 字段"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if versioned and isinstance(payload, dict):
        payload = {"format_version": FORMAT_VERSION, **payload}
    path.write_bytes(dumps(payload) + b"\n")
    return path


def load_json(path: str | Path, schema: dict | None = None) -> Any:
    """读取 JSON 文件；解析或 schema 校验失败统一抛 ParseError"""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ParseError(f"cannot read file: {e.strerror}", path=str(path)) from e

    try:
        data = orjson.loads(raw)
    except orjson.JSONDecodeError as e:
        raise ParseError(
            f"malformed JSON: {e.msg}", path=str(path), location=f"line {e.lineno}, column {e.colno}"
        ) from e

    if schema is not None:
        validate_schema(data, schema, path=str(path))
    return data


def validate_schema(data: Any, schema: dict, path: str | None = None) -> None:
    """按 schema 校验；报告第一处（按路径排序）错误的 JSON 路径"""
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        first = errors[0]
        location = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise ParseError(f"schema violation: {first.message}", path=path, location=location)


def pydantic_location(exc: Exception) -> str:
    """把 pydantic ValidationError 的首个错误位置格式化为 a/b/0 形式"""
    errors = getattr(exc, "errors", None)
    if not callable(errors):
        return "<root>"
    items = errors()
    if not items:
        return "<root>"
    return "/".join(str(p) for p in items[0].get("loc", ())) or "<root>"
