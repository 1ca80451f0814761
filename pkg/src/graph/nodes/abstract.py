"""src/graph/nodes/abstract.py — 抽象节点：构建 F / F′ 与 F⁰，计算 δ_F"""
from __future__ import annotations

import logging

from src.abstraction.io import load_dynamics, save_abstraction
from src.abstraction.states import build_states, initial_unsafe
from src.abstraction.transitions import TransitionOptions, compute_transitions
from src.errors import DimensionMismatch
from src.graph.nodes.base_node import output_dir, phase_node, with_artifacts
from src.graph.state import VerifyState

logger = logging.getLogger(__name__)


@phase_node("abstract")
def abstract_node(state: VerifyState) -> dict:
    config = state["config"]
    config.check_inputs("dynamics")
    dyn, bounds = load_dynamics(config.dynamics, config.epsilon)
    net = state["network"]
    if dyn.m != net.output_dim:
        raise DimensionMismatch(f"B has {dyn.m} columns, network outputs {net.output_dim}")

    space = build_states(state["partition"], bounds)
    unsafe0 = initial_unsafe(space, config.strict_closed, config.geometry_tolerance)
    options = TransitionOptions(
        refine_intra=config.refine_intra,
        skip_unsafe_sources=config.skip_unsafe_sources,
        backend=config.sat_backend,
        tol=config.lp_tolerance,
        budget=config.budget(),
        workers=config.workers,
    )
    ts = compute_transitions(space, dyn, net, state["maps"], state.get("conflicts") or {}, unsafe0, options)
    path = save_abstraction(ts, output_dir(state) / "abstraction.json")
    return {
        "dynamics": dyn,
        "bounds": bounds,
        "space": space,
        "transitions": ts,
        "artifacts": with_artifacts(state, abstraction=path),
        "log": {"states": len(ts.states), "transitions": ts.transition_count(),
                "incomplete": len(ts.incomplete_pairs)},
    }
