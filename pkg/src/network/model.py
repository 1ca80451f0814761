"""src/network/model.py — ReLU 控制器网络与前向求值

u = W^L h^L + w^L，h^l = max(0, t^l)，t^1 = W^0 d + w^0，t^l = W^{l−1} h^{l−1} + w^{l−1}。
L = 0 时网络退化为纯仿射控制器 u = W^0 d + w^0。
"""
from __future__ import annotations

from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.errors import DimensionMismatch


class NeuralNetwork(BaseModel):
    """L 个 ReLU 隐层 + 线性输出层；weights/biases 共 L+1 组"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    input_dim: int
    output_dim: int

    @model_validator(mode="after")
    def _check(self) -> "NeuralNetwork":
        validate(self)
        return self

    @classmethod
    def from_layers(cls, layers, input_dim: int | None = None, output_dim: int | None = None) -> "NeuralNetwork":
        """由 [(W, w), ...] 构造；未给出维度时按首尾层推断"""
        weights = tuple(np.atleast_2d(np.asarray(W, dtype=float)) for W, _ in layers)
        biases = tuple(np.atleast_1d(np.asarray(w, dtype=float)) for _, w in layers)
        if input_dim is None:
            input_dim = weights[0].shape[1] if weights else 0
        if output_dim is None:
            output_dim = weights[-1].shape[0] if weights else 0
        return cls(weights=weights, biases=biases, input_dim=input_dim, output_dim=output_dim)

    @property
    def layer_count(self) -> int:
        """隐层数 L"""
        return len(self.weights) - 1

    @cached_property
    def hidden_sizes(self) -> tuple[int, ...]:
        """M_1..M_L"""
        return tuple(W.shape[0] for W in self.weights[:-1])

    @property
    def relu_count(self) -> int:
        return sum(self.hidden_sizes)

    def relu_index(self, layer: int, neuron: int) -> int:
        """第 layer 层（1-based）第 neuron 个（0-based）ReLU 的全局编号，从 1 开始"""
        return sum(self.hidden_sizes[: layer - 1]) + neuron + 1

    def relu_position(self, index: int) -> tuple[int, int]:
        """relu_index 的逆映射"""
        remaining = index - 1
        for layer, size in enumerate(self.hidden_sizes, start=1):
            if remaining < size:
                return layer, remaining
            remaining -= size
        raise IndexError(f"ReLU index {index} out of range")


def validate(net: NeuralNetwork) -> None:
    """
    检查维度链：W^0 有 input_dim 列，相邻层维度衔接，W^L 输出 output_dim 维，所有数值有限

    Raises:
        DimensionMismatch: 附带出错的层号 l（对应 W^l / w^l）
    """
    if not net.weights:
        raise DimensionMismatch("network has no layers", layer=0)
    if len(net.weights) != len(net.biases):
        raise DimensionMismatch(f"{len(net.weights)} weight matrices but {len(net.biases)} bias vectors")

    cols = net.input_dim
    last = len(net.weights) - 1
    for l, (W, w) in enumerate(zip(net.weights, net.biases)):
        if W.ndim != 2:
            raise DimensionMismatch(f"weight matrix must be 2-D, got shape {W.shape}", layer=l)
        if W.shape[1] != cols:
            raise DimensionMismatch(f"W has {W.shape[1]} columns, expected {cols}", layer=l)
        if W.shape[0] == 0:
            raise DimensionMismatch("layer has no neurons", layer=l)
        if w.shape != (W.shape[0],):
            raise DimensionMismatch(f"bias has shape {w.shape}, expected ({W.shape[0]},)", layer=l)
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(w))):
            raise DimensionMismatch("non-finite weight or bias", layer=l)
        if l == last and W.shape[0] != net.output_dim:
            raise DimensionMismatch(f"output layer has {W.shape[0]} rows, expected {net.output_dim}", layer=l)
        cols = W.shape[0]


class ForwardTrace(BaseModel):
    """一次前向求值的全部中间量"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    pre_activations: tuple[np.ndarray, ...]     # t^1..t^L
    activations: tuple[np.ndarray, ...]         # h^1..h^L
    output: np.ndarray                          # u
    phases: tuple[np.ndarray, ...]              # b^l = (t^l > 0)

    def flat_phases(self) -> tuple[bool, ...]:
        """按全局 ReLU 编号展开的相位"""
        return tuple(bool(b) for layer in self.phases for b in layer)


def forward(net: NeuralNetwork, d: np.ndarray) -> ForwardTrace:
    """前向求值；t 恰为 0 时相位记为 False"""
    x = np.asarray(d, dtype=float).reshape(-1)
    if x.shape[0] != net.input_dim:
        raise DimensionMismatch(f"input has {x.shape[0]} entries, expected {net.input_dim}", layer=0)

    pre, post, phases = [], [], []
    h = x
    for W, w in zip(net.weights[:-1], net.biases[:-1]):
        t = W @ h + w
        h = np.maximum(t, 0.0)
        pre.append(t)
        post.append(h)
        phases.append(t > 0.0)
    u = net.weights[-1] @ h + net.biases[-1]
    return ForwardTrace(pre_activations=tuple(pre), activations=tuple(post), output=u, phases=tuple(phases))


def controller(net: NeuralNetwork, d: np.ndarray) -> np.ndarray:
    """f_NN(d)，批量输入 (K, 2N) → (K, m)"""
    h = np.atleast_2d(np.asarray(d, dtype=float))
    for W, w in zip(net.weights[:-1], net.biases[:-1]):
        h = np.maximum(h @ W.T + w, 0.0)
    return h @ net.weights[-1].T + net.biases[-1]
