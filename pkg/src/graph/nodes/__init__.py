"""
Graph 节点模块

流水线节点（按执行顺序）:
- partition_node
- preprocess_node
- abstract_node
- fixed_point_node
- report_node
"""

from .partition import partition_node
from .preprocess import preprocess_node
from .abstract import abstract_node
from .fixed_point import fixed_point_node
from .report import report_node


__all__ = [
    "partition_node",
    "preprocess_node",
    "abstract_node",
    "fixed_point_node",
    "report_node",
]
