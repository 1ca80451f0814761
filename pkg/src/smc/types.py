"""src/smc/types.py — 线性约束系统与 SMC 结果类型"""
from __future__ import annotations

from typing import Iterable, Literal, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

Sense = Literal["<=", ">=", "=="]


class Constraint(NamedTuple):
    """Σ coef·var (sense) rhs；terms 为 (变量下标, 系数)"""
    terms: tuple[tuple[int, float], ...]
    sense: Sense
    rhs: float
    label: str = ""


class LinearConstraintSystem(BaseModel):
    """命名实变量上的线性等式/不等式（闭集），无目标函数"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    variables: list[str] = []
    constraints: list[Constraint] = []

    # ── 构建 ──

    def add_var(self, name: str) -> int:
        self.variables.append(name)
        return len(self.variables) - 1

    def add_vars(self, prefix: str, count: int) -> list[int]:
        """批量声明 prefix[0..count-1]，返回变量下标"""
        return [self.add_var(f"{prefix}[{i}]") for i in range(count)]

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def add(self, coeffs: dict[int | str, float], sense: Sense, rhs: float, label: str = "") -> Constraint:
        """添加约束；coeffs 的键可以是变量下标或变量名"""
        terms = []
        for key, coef in coeffs.items():
            idx = self.index(key) if isinstance(key, str) else int(key)
            if not 0 <= idx < len(self.variables):
                raise KeyError(f"undeclared variable {key!r}")
            if not np.isfinite(coef):
                raise ValueError(f"non-finite coefficient for {key!r}")
            if coef != 0.0:
                terms.append((idx, float(coef)))
        c = Constraint(tuple(terms), sense, float(rhs), label)
        self.constraints.append(c)
        return c

    def add_rows(self, matrix: np.ndarray, columns: list[int], sense: Sense, rhs: np.ndarray,
                 label: str = "") -> None:
        """matrix @ var[columns] (sense) rhs，逐行添加"""
        for row, b in zip(np.atleast_2d(matrix), np.atleast_1d(rhs)):
            self.add({c: v for c, v in zip(columns, row)}, sense, float(b), label)

    def extended(self, extra: Iterable[Constraint]) -> "LinearConstraintSystem":
        """返回追加了 extra 约束的新系统（变量表共享）"""
        return LinearConstraintSystem.model_construct(
            variables=self.variables, constraints=[*self.constraints, *extra])

    # ── 求解用的稠密形式 ──

    def compile(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(A_ub, b_ub, A_eq, b_eq)；≥ 约束取负号转为 ≤"""
        n = len(self.variables)
        ub = [c for c in self.constraints if c.sense != "=="]
        eq = [c for c in self.constraints if c.sense == "=="]
        A_ub, b_ub = np.zeros((len(ub), n)), np.zeros(len(ub))
        for r, c in enumerate(ub):
            sign = -1.0 if c.sense == ">=" else 1.0
            for idx, coef in c.terms:
                A_ub[r, idx] += sign * coef
            b_ub[r] = sign * c.rhs
        A_eq, b_eq = np.zeros((len(eq), n)), np.zeros(len(eq))
        for r, c in enumerate(eq):
            for idx, coef in c.terms:
                A_eq[r, idx] += coef
            b_eq[r] = c.rhs
        return A_ub, b_ub, A_eq, b_eq

    def violation(self, point: np.ndarray) -> float:
        """point 对全部约束的最大违反量（按 1 + |rhs| 归一）"""
        worst = 0.0
        for c in self.constraints:
            lhs = sum(coef * point[idx] for idx, coef in c.terms)
            if c.sense == "<=":
                v = lhs - c.rhs
            elif c.sense == ">=":
                v = c.rhs - lhs
            else:
                v = abs(lhs - c.rhs)
            worst = max(worst, v / (1.0 + abs(c.rhs)))
        return worst


class Feasible(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    point: np.ndarray


class Infeasible(BaseModel):
    model_config = ConfigDict(frozen=True)

    certificate: str = "highs:infeasible"


LpResult = Feasible | Infeasible


class Conflict(BaseModel):
    """与基础系统联立不可行的 ReLU 指示文字集合（DIMACS 符号整数）"""
    model_config = ConfigDict(frozen=True)

    literals: tuple[int, ...]

    @property
    def clause(self) -> tuple[int, ...]:
        """加入 SAT 求解器的冲突子句 ¬(l1 ∧ … ∧ lk)"""
        return tuple(-l for l in self.literals)


class Witness(BaseModel):
    """SAT 时的实变量取值与相位"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    variables: tuple[str, ...]
    point: np.ndarray
    phases: tuple[bool, ...]

    def vector(self, prefix: str) -> np.ndarray:
        """取出 prefix[0], prefix[1], … 组成的向量"""
        idx = [i for i, name in enumerate(self.variables) if name.startswith(prefix + "[")]
        return self.point[idx]


class SmcOutcome(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    status: Literal["SAT", "UNSAT"]
    witness: Witness | None = None
    conflicts_generated: list[Conflict] = []
    lp_calls: int = 0


class PreprocessResult(BaseModel):
    """单个区域预处理：所有可行相位与全部 IIS 冲突"""
    feasible_phases: list[tuple[bool, ...]] = []
    conflicts: list[Conflict] = []
    lp_calls: int = 0
    seconds: float = 0.0
    censored: bool = Field(False, description="预算耗尽时为 True，结果不完整")
