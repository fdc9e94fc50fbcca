"""Wire arrangement optimization for planar tendon-driven manipulators.

The package models a fixed planar link chain actuated by wires routed
through relay points (or by constant-moment-arm pulleys), scores candidate
arrangements by how well their feasible operational force and velocity
spaces cover target ellipses, and searches the mixed discrete/continuous
design space with NSGA-II.
"""

__version__ = "0.1.0"

from .arrangement import (
    ConstantArrangement,
    DesignSpace,
    Genome,
    RelayPoint,
    VariableArrangement,
    genome_decode,
    genome_encode,
    muscle_jacobian,
    wire_lengths,
)
from .config import ConfigError, ScenarioConfig, load_config
from .feasibility import (
    ActuatorLimits,
    EvaluationResult,
    InfeasibleDesign,
    Scenario,
    TargetSpec,
    evaluate,
    force_h,
    gravity_center,
    trace_polygon,
    velocity_h,
)
from .model import (
    Pose,
    RobotModel,
    forward_kinematics,
    gravity_torque,
    joint_jacobian,
)
from .nsga2 import (
    Individual,
    ParetoArchive,
    crowding_distance,
    evolve,
    hypervolume_2d,
    non_dominated_sort,
    random_search,
)
from .oracle import ConvexPolygon, force_polytope_exact, ray_h, velocity_polytope_exact
from .simplex import LinearProgram, LPResult, solve_lp_max

__all__ = [
    "ActuatorLimits",
    "ConfigError",
    "ConstantArrangement",
    "ConvexPolygon",
    "DesignSpace",
    "EvaluationResult",
    "Genome",
    "Individual",
    "InfeasibleDesign",
    "LPResult",
    "LinearProgram",
    "ParetoArchive",
    "Pose",
    "RelayPoint",
    "RobotModel",
    "Scenario",
    "ScenarioConfig",
    "TargetSpec",
    "VariableArrangement",
    "crowding_distance",
    "evaluate",
    "evolve",
    "force_h",
    "force_polytope_exact",
    "forward_kinematics",
    "genome_decode",
    "genome_encode",
    "gravity_center",
    "gravity_torque",
    "hypervolume_2d",
    "joint_jacobian",
    "load_config",
    "muscle_jacobian",
    "non_dominated_sort",
    "random_search",
    "ray_h",
    "solve_lp_max",
    "trace_polygon",
    "velocity_h",
    "velocity_polytope_exact",
    "wire_lengths",
]
