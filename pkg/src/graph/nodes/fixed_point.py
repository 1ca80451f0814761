"""src/graph/nodes/fixed_point.py — 不动点节点：F_unsafe / F_safe 与 X_safe"""
from __future__ import annotations

from src.abstraction.fixed_point import safe_set, unsafe_fixed_point
from src.abstraction.io import save_abstraction, save_safe_set
from src.graph.nodes.base_node import output_dir, phase_node, with_artifacts
from src.graph.state import VerifyState
from src.report.svg import render_safe_set


@phase_node("fixed_point")
def fixed_point_node(state: VerifyState) -> dict:
    ts, space = state["transitions"], state["space"]
    fp = unsafe_fixed_point(ts)
    safe = safe_set(fp.safe, space)

    out = output_dir(state)
    abstraction = save_abstraction(ts, out / "abstraction.json", fp)
    safe_json = save_safe_set(safe, out / "safe_set.json")
    safe_svg = render_safe_set(space.partition, sorted({c.region for c in safe.cells}), out / "safe_set.svg")
    return {
        "fixed_point": fp,
        "safe": safe,
        "artifacts": with_artifacts(state, abstraction=abstraction, safe_set=safe_json, safe_set_svg=safe_svg),
        "log": {"safe": len(fp.safe), "unsafe": len(fp.unsafe)},
    }
