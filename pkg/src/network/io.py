"""src/network/io.py — 网络权重 JSON 读写

格式：{"layers": [{"W": [[...]], "w": [...]}, ...], "input_dim": 2N, "output_dim": m}
"""
from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np

from src.errors import DimensionMismatch
from src.network.model import NeuralNetwork
from src.utils.jsonio import dump_json, load_json

NETWORK_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["layers", "input_dim", "output_dim"],
    "properties": {
        "format_version": {"type": "integer"},
        "input_dim": {"type": "integer", "minimum": 1},
        "output_dim": {"type": "integer", "minimum": 1},
        "layers": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["W", "w"],
                "properties": {
                    "W": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
                    "w": {"type": "array", "items": {"type": "number"}},
                },
            },
        },
    },
}


def network_from_dict(data: dict[str, Any]) -> NeuralNetwork:
    weights, biases = [], []
    for l, layer in enumerate(data["layers"]):
        try:
            W = np.array(layer["W"], dtype=float)
        except ValueError as e:
            raise DimensionMismatch("weight rows have different lengths", layer=l) from e
        if W.ndim != 2:
            # 空矩阵 [] 或参差不齐的行
            W = W.reshape(0, 0) if W.size == 0 else np.atleast_2d(W)
        weights.append(W)
        biases.append(np.array(layer["w"], dtype=float).reshape(-1))
    return NeuralNetwork(
        weights=tuple(weights),
        biases=tuple(biases),
        input_dim=int(data["input_dim"]),
        output_dim=int(data["output_dim"]),
    )


def network_to_dict(net: NeuralNetwork) -> dict[str, Any]:
    return {
        "input_dim": net.input_dim,
        "output_dim": net.output_dim,
        "layers": [{"W": W.tolist(), "w": w.tolist()} for W, w in zip(net.weights, net.biases)],
    }


def load_network(path: str | Path) -> NeuralNetwork:
    """
    读取网络

    Raises:
        ParseError: JSON 无法解析或不符合 schema
        DimensionMismatch: 声明维度与权重形状不一致
    """
    data = load_json(path, schema=NETWORK_SCHEMA)
    return network_from_dict(data)


def save_network(net: NeuralNetwork, path: str | Path) -> Path:
    return dump_json(path, network_to_dict(net))
