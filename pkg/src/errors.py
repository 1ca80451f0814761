"""src/errors.py — 统一异常层次

InputError 子类对应 CLI 退出码 2；其余属于运行期/数值问题。
"""
from __future__ import annotations


class VerificationError(Exception):
    """所有验证流程异常的基类"""


class InputError(VerificationError):
    """输入数据不合法（CLI 退出码 2）"""


class InvalidWorkspace(InputError):
    """工作空间不合法：障碍物重叠、越界、边界非凸等"""


class DegenerateInput(InputError):
    """退化几何输入（全部共线、零长度线段等）"""


class ParseError(InputError):
    """输入文件无法解析，附带路径与出错位置"""

    def __init__(self, message: str, path: str | None = None, location: str | None = None):
        self.path = path
        self.location = location
        where = ""
        if path:
            where = f" [{path}"
            where += f" @ {location}]" if location else "]"
        super().__init__(f"{message}{where}")


class DimensionMismatch(InputError):
    """网络/动力学/成像映射维度不一致"""

    def __init__(self, message: str, layer: int | None = None):
        self.layer = layer
        prefix = f"layer {layer}: " if layer is not None else ""
        super().__init__(prefix + message)


class NonDivisibleBounds(InputError):
    """(x̄_i - x̲_i) / ε 不是正整数"""


class NoHit(VerificationError):
    """射线未击中任何障碍物或边界（内部起点时不可能发生）"""


class NotImagingAdapted(VerificationError):
    """区域内不同位置的同一激光击中了不同的边（分区有缺陷）"""


class ParallelDegenerate(VerificationError):
    """激光方向与击中边平行，无法建立仿射成像映射"""


class OutOfRegion(VerificationError):
    """位置不在成像映射所属区域内"""


class NumericalFailure(VerificationError):
    """LP 求解器无法在容差内给出可行/不可行结论"""


class NotInfeasible(VerificationError):
    """extract_iis 的前提（系统不可行）不成立"""


class ResourceLimit(VerificationError):
    """SMC 求解超出时间或冲突预算（不同于 UNSAT）"""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"resource limit reached: {reason}")
