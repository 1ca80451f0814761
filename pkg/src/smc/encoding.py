"""src/smc/encoding.py — 转移可行性 / 区域预处理的单调 SMC 编码

实变量：x, x′ ∈ Rⁿ，u ∈ Rᵐ，d ∈ R^{2N}，t^l, h^l ∈ R^{M_l}
基础约束：区域成员、辅助维区间、目标单元、动力学、成像、层间仿射等式
受保护约束：b ⇒ {h = t, t ≥ 0}；¬b ⇒ {h = 0, t ≤ 0}（严格不等式取闭包）
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.errors import DimensionMismatch
from src.imaging.maps import AffineImagingMap
from src.network.model import NeuralNetwork
from src.smc.types import Constraint, LinearConstraintSystem, Sense

if TYPE_CHECKING:
    from src.abstraction.types import Dynamics, StateCell

# 对 x′ 的附加线性约束：(系数向量 (n,), sense, rhs)
TargetConstraint = tuple[np.ndarray, Sense, float]


class MonotoneSmcProblem(BaseModel):
    """布尔 ReLU 指示变量 + 线性约束系统 + 学到的子句"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    bool_count: int
    base: LinearConstraintSystem
    guarded: dict[int, list[Constraint]]
    learned_clauses: list[tuple[int, ...]] = []

    def with_clauses(self, clauses: Sequence[Sequence[int]]) -> "MonotoneSmcProblem":
        return self.model_copy(update={"learned_clauses": [*self.learned_clauses, *map(tuple, clauses)]})

    def guarded_constraints(self, literals: Sequence[int]) -> list[Constraint]:
        return [c for l in literals for c in self.guarded.get(l, [])]


def _add_region(sys: LinearConstraintSystem, cols: list[int], cell: "StateCell", label: str) -> None:
    """ζ ∈ region（半空间），辅助维落在闭区间内"""
    H, g = cell.region.halfspaces
    sys.add_rows(H, cols[:2], "<=", g, label=f"{label}:region")
    for i, (lo, hi) in enumerate(cell.box):
        sys.add({cols[2 + i]: 1.0}, ">=", lo, label=f"{label}:box")
        sys.add({cols[2 + i]: 1.0}, "<=", hi, label=f"{label}:box")


def _add_network(
    sys: LinearConstraintSystem,
    d_cols: list[int],
    u_cols: list[int],
    net: NeuralNetwork,
) -> dict[int, list[Constraint]]:
    """层间仿射等式写入 sys，返回每个文字的受保护约束"""
    guarded: dict[int, list[Constraint]] = {}
    prev = d_cols
    for l, (W, w) in enumerate(zip(net.weights[:-1], net.biases[:-1]), start=1):
        t_cols = sys.add_vars(f"t{l}", W.shape[0])
        h_cols = sys.add_vars(f"h{l}", W.shape[0])
        for j in range(W.shape[0]):
            # t^l_j − W^{l−1}_j · h^{l−1} = w^{l−1}_j
            coeffs = {t_cols[j]: 1.0}
            for c, v in zip(prev, W[j]):
                coeffs[c] = coeffs.get(c, 0.0) - v
            sys.add(coeffs, "==", w[j], label=f"layer{l}")

            k = net.relu_index(l, j)
            t, h = t_cols[j], h_cols[j]
            guarded[k] = [
                Constraint(((h, 1.0), (t, -1.0)), "==", 0.0, f"relu{k}:on"),
                Constraint(((t, 1.0),), ">=", 0.0, f"relu{k}:on"),
            ]
            guarded[-k] = [
                Constraint(((h, 1.0),), "==", 0.0, f"relu{k}:off"),
                Constraint(((t, 1.0),), "<=", 0.0, f"relu{k}:off"),
            ]
        prev = h_cols

    W, w = net.weights[-1], net.biases[-1]
    for j in range(W.shape[0]):
        coeffs = {u_cols[j]: 1.0}
        for c, v in zip(prev, W[j]):
            coeffs[c] = coeffs.get(c, 0.0) - v
        sys.add(coeffs, "==", w[j], label="output")
    return guarded


def _add_imaging(sys: LinearConstraintSystem, d_cols: list[int], z_cols: list[int], maps: AffineImagingMap) -> None:
    """d − P_all ζ = Q_all"""
    P_all, Q_all = maps.stacked
    for r in range(P_all.shape[0]):
        sys.add({d_cols[r]: 1.0, z_cols[0]: -P_all[r, 0], z_cols[1]: -P_all[r, 1]}, "==", Q_all[r],
                label="imaging")


def _check_dims(net: NeuralNetwork, maps: AffineImagingMap, dyn: "Dynamics | None" = None,
                cell: "StateCell | None" = None) -> None:
    if net.input_dim != 2 * maps.laser_count:
        raise DimensionMismatch(f"network expects {net.input_dim} inputs, LiDAR provides {2 * maps.laser_count}")
    if dyn is not None:
        if dyn.m != net.output_dim:
            raise DimensionMismatch(f"B has {dyn.m} columns, network outputs {net.output_dim}")
        if cell is not None and len(cell.box) != dyn.n - 2:
            raise DimensionMismatch(f"cell has {len(cell.box)} aux intervals, dynamics has {dyn.n - 2} aux dims")


def encode_transition(
    dyn: "Dynamics",
    from_cell: "StateCell",
    to_cell: "StateCell | None",
    maps: AffineImagingMap,
    net: NeuralNetwork,
    target_constraints: Sequence[TargetConstraint] = (),
) -> MonotoneSmcProblem:
    """
    ∃x ∈ from_cell：x′ = A x + B f_NN(d(x)) ∈ to_cell（且满足 target_constraints）

    to_cell 为 None 时只使用 target_constraints（汇点检查用）。
    """
    _check_dims(net, maps, dyn, from_cell)
    if to_cell is not None and len(to_cell.box) != dyn.n - 2:
        raise DimensionMismatch(f"target cell has {len(to_cell.box)} aux intervals, expected {dyn.n - 2}")

    sys = LinearConstraintSystem()
    x = sys.add_vars("x", dyn.n)
    xp = sys.add_vars("xp", dyn.n)
    u = sys.add_vars("u", dyn.m)
    d = sys.add_vars("d", net.input_dim)

    _add_region(sys, x, from_cell, "source")
    if to_cell is not None:
        _add_region(sys, xp, to_cell, "target")
    for coef, sense, rhs in target_constraints:
        sys.add({xp[i]: float(v) for i, v in enumerate(coef)}, sense, rhs, label="target:extra")

    for i in range(dyn.n):
        coeffs = {xp[i]: 1.0}
        for j in range(dyn.n):
            coeffs[x[j]] = coeffs.get(x[j], 0.0) - dyn.A[i, j]
        for k in range(dyn.m):
            coeffs[u[k]] = coeffs.get(u[k], 0.0) - dyn.B[i, k]
        sys.add(coeffs, "==", 0.0, label="dynamics")

    _add_imaging(sys, d, x[:2], maps)
    guarded = _add_network(sys, d, u, net)
    return MonotoneSmcProblem(bool_count=net.relu_count, base=sys, guarded=guarded)


def encode_region(cell: "StateCell", maps: AffineImagingMap, net: NeuralNetwork) -> MonotoneSmcProblem:
    """预处理用的约简编码：只有区域成员、成像与网络，不含动力学和目标单元"""
    _check_dims(net, maps)
    sys = LinearConstraintSystem()
    z = sys.add_vars("x", 2)
    u = sys.add_vars("u", net.output_dim)
    d = sys.add_vars("d", net.input_dim)
    H, g = cell.region.halfspaces
    sys.add_rows(H, z, "<=", g, label="source:region")
    _add_imaging(sys, d, z, maps)
    guarded = _add_network(sys, d, u, net)
    return MonotoneSmcProblem(bool_count=net.relu_count, base=sys, guarded=guarded)
