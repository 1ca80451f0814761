"""src/abstraction/io.py — 动力学输入与抽象 / 安全集产物

动力学格式：{"A": [[...]], "B": [[...]], "aux_lower": [...], "aux_upper": [...]}；ε 来自运行配置。
"""
from __future__ import annotations

from pathlib import Path
from typing import Any

from src.abstraction.fixed_point import FixedPoint, SafeCell, SafeSet
from src.abstraction.types import Dynamics, StateBounds, StateCell, TransitionSystem
from src.errors import DimensionMismatch
from src.geometry.types import ConvexPolygon
from src.utils.jsonio import dump_json, load_json

_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "items": {"type": "number"}}}

DYNAMICS_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["A", "B"],
    "properties": {
        "format_version": {"type": "integer"},
        "A": _MATRIX,
        "B": _MATRIX,
        "aux_lower": {"type": "array", "items": {"type": "number"}},
        "aux_upper": {"type": "array", "items": {"type": "number"}},
    },
}


def load_dynamics(path: str | Path, epsilon: float = 1.0) -> tuple[Dynamics, StateBounds]:
    """
    读取 (A, B) 与辅助维界

    Raises:
        ParseError: JSON 无法解析或不符合 schema
        DimensionMismatch: 矩阵形状不一致，或辅助维界个数不等于 n − 2
        NonDivisibleBounds: 区间长度不是 ε 的整数倍
    """
    data = load_json(path, schema=DYNAMICS_SCHEMA)
    try:
        dyn = Dynamics.from_lists(data["A"], data["B"])
    except ValueError as e:
        raise DimensionMismatch(f"ragged matrix in {path}") from e
    bounds = StateBounds(
        lower=tuple(data.get("aux_lower", ())),
        upper=tuple(data.get("aux_upper", ())),
        epsilon=epsilon,
    )
    if bounds.aux_dims != dyn.n - 2:
        raise DimensionMismatch(f"dynamics has {dyn.n - 2} aux dims but {bounds.aux_dims} bounds are given")
    return dyn, bounds


def save_dynamics(dyn: Dynamics, bounds: StateBounds, path: str | Path) -> Path:
    return dump_json(path, {
        "A": dyn.A.tolist(),
        "B": dyn.B.tolist(),
        "aux_lower": list(bounds.lower),
        "aux_upper": list(bounds.upper),
    })


def abstraction_to_dict(ts: TransitionSystem, fixed_point: FixedPoint | None = None) -> dict[str, Any]:
    """状态、聚合、转移对列表、F⁰；给出不动点时附带 F_safe / F_unsafe"""
    payload: dict[str, Any] = {
        "states": [{"region": s.region, "cell": list(s.cell)} for s in ts.states],
        "sink": ts.sink,
        "aggregates": ts.aggregates,
        "transitions": [list(p) for p in ts.pairs()],
        "unsafe0": ts.unsafe0,
        "incomplete": [[s, label] for s, label in ts.incomplete_pairs],
        "counts": {
            "states": len(ts.states),
            "aggregates": len(ts.aggregates),
            "transitions": ts.transition_count(),
            "smc_calls": ts.smc_calls,
        },
    }
    if fixed_point is not None:
        payload["safe"] = fixed_point.safe
        payload["unsafe"] = fixed_point.unsafe
    return payload


def save_abstraction(ts: TransitionSystem, path: str | Path, fixed_point: FixedPoint | None = None) -> Path:
    return dump_json(path, abstraction_to_dict(ts, fixed_point))


def save_safe_set(safe: SafeSet, path: str | Path) -> Path:
    return dump_json(path, safe.to_dict())


SAFE_SET_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["cells"],
    "properties": {
        "format_version": {"type": "integer"},
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["state", "region", "polygon", "box"],
                "properties": {
                    "polygon": _MATRIX,
                    "box": {"type": "array", "items": {"type": "array", "items": {"type": "number"},
                                                       "minItems": 2, "maxItems": 2}},
                },
            },
        },
    },
}


def load_safe_set(path: str | Path) -> SafeSet:
    data = load_json(path, schema=SAFE_SET_SCHEMA)
    cells = tuple(
        SafeCell(
            state=int(c["state"]),
            region=int(c["region"]),
            cell=StateCell(
                region=ConvexPolygon.from_points(c["polygon"]),
                box=tuple((float(lo), float(hi)) for lo, hi in c["box"]),
                region_index=int(c["region"]),
            ),
        )
        for c in data["cells"]
    )
    return SafeSet(cells=cells)
