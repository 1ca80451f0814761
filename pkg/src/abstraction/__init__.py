"""src/abstraction — 有限状态抽象 S_F、不安全集不动点与闭环仿真"""
from src.abstraction.fixed_point import FixedPoint, SafeCell, SafeSet, predecessors, safe_set, unsafe_fixed_point
from src.abstraction.io import (
    abstraction_to_dict,
    load_dynamics,
    load_safe_set,
    save_abstraction,
    save_dynamics,
    save_safe_set,
)
from src.abstraction.simulate import (
    BatchSimulation,
    SimulationResult,
    sample_safe_starts,
    simulate,
    simulate_batch,
)
from src.abstraction.states import StateSpace, build_states, initial_unsafe, unsafe_regions
from src.abstraction.transitions import TransitionOptions, compute_transitions, sink_constraints
from src.abstraction.types import AbstractState, Dynamics, StateBounds, StateCell, TransitionSystem

__all__ = [
    "AbstractState",
    "BatchSimulation",
    "Dynamics",
    "FixedPoint",
    "SafeCell",
    "SafeSet",
    "SimulationResult",
    "StateBounds",
    "StateCell",
    "StateSpace",
    "TransitionOptions",
    "TransitionSystem",
    "abstraction_to_dict",
    "build_states",
    "compute_transitions",
    "initial_unsafe",
    "load_dynamics",
    "load_safe_set",
    "predecessors",
    "safe_set",
    "sample_safe_starts",
    "save_abstraction",
    "save_dynamics",
    "save_safe_set",
    "simulate",
    "simulate_batch",
    "sink_constraints",
    "unsafe_fixed_point",
    "unsafe_regions",
]
