"""Optimal advertising with delayed goodwill dynamics: simulation, lifting and explicit HJB."""

from .errors import DomainError, ScenarioError, UnsupportedScenario
from .grid import ControlPath, SegmentPath
from .hjb import (
    LinearValueFunction,
    eval_w1,
    hamiltonian,
    integral_residual,
    optimal_control_path,
    solve,
    solve_c,
    solve_w,
    value_function,
)
from .lift import (
    LiftedState,
    apply_A,
    apply_Astar,
    apply_B,
    apply_M,
    check_equivalence,
    inner_product,
    simulate_lifted,
)
from .noise import NoisePath
from .params import PointDelay, ScenarioParams
from .sdde import mc_estimate_objective, simulate_sdde
from .stability import gamma_root, invariant_measure_condition
from .verification import fundamental_identity_gap, mc_identity_check, verify_dominance

__version__ = "0.1.0"
