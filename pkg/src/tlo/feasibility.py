"""Scoring of wire arrangements against target force/velocity ellipses.

For every evaluated joint state and every ellipse direction, a small LP
finds the factor h by which the feasible operational space covers the
target along that direction: h >= 1 means covered. The objectives to
minimize are E_force and E_velocity, the summed shortfalls max(1-h, 0).

The h variable is unbounded inside the LPs; reported values are clipped to
h_cap afterwards. That makes every score independent of the cap (any cap
>= 1 yields identical objectives, since contributions vanish at h >= 1)
and turns genuinely unbounded velocity sets into a plain h = h_cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import simplex
from .arrangement import ConstantArrangement, WireArrangement, muscle_jacobian
from .model import RobotModel, gravity_torque, joint_jacobian

DEFAULT_H_CAP = 10.0
_THETA_DOT_BOUND = 1e6  # formal box on joint velocities; never binds below h_cap
_SINGULAR_RESIDUAL = 1e-6


class InfeasibleDesign(Exception):
    """Raised when a coverage LP has no solution; the design is pruned."""


@dataclass
class TargetSpec:
    """Target force ellipse (center + radii, N) and velocity ellipse (radii, m/s)."""

    force_center: np.ndarray
    force_radii: np.ndarray
    velocity_radii: np.ndarray
    n_directions: int = 8

    def __post_init__(self):
        self.force_center = np.asarray(self.force_center, dtype=float).reshape(2)
        self.force_radii = np.asarray(self.force_radii, dtype=float).reshape(2)
        self.velocity_radii = np.asarray(self.velocity_radii, dtype=float).reshape(2)
        if np.any(self.force_radii <= 0) or np.any(self.velocity_radii <= 0):
            raise ValueError("ellipse radii must be positive")
        if self.n_directions < 3:
            raise ValueError("need at least 3 ellipse directions")


@dataclass
class ActuatorLimits:
    f_min: float
    f_max: float
    ldot_min: float
    ldot_max: float

    def __post_init__(self):
        if not 0 < self.f_min < self.f_max:
            raise ValueError("need 0 < f_min < f_max")
        if not self.ldot_min < 0 < self.ldot_max:
            raise ValueError("need ldot_min < 0 < ldot_max")


@dataclass
class Scenario:
    """Evaluation context: limits, targets, gravity switch, joint states."""

    limits: ActuatorLimits
    target: TargetSpec
    joint_states: list[np.ndarray]
    gravity: bool = False
    h_cap: float = DEFAULT_H_CAP

    def __post_init__(self):
        if not self.joint_states:
            raise ValueError("need at least one evaluated joint state")
        self.joint_states = [np.asarray(q, dtype=float) for q in self.joint_states]
        if self.h_cap < 1.0:
            raise ValueError("h_cap below 1 would distort the objectives")

    @property
    def max_objective(self) -> float:
        return float(self.target.n_directions * len(self.joint_states))


@dataclass
class EvaluationResult:
    """Per-state h arrays and the summed shortfall objectives."""

    feasible: bool
    h_force: list[np.ndarray] | None = None
    h_velocity: list[np.ndarray] | None = None
    e_force: float | None = None
    e_velocity: float | None = None


class GravityCenter(NamedTuple):
    center: np.ndarray
    residual: float

    @property
    def singular(self) -> bool:
        return self.residual > _SINGULAR_RESIDUAL


def ellipse_directions(radii: np.ndarray, n_directions: int) -> np.ndarray:
    """Direction vectors w_i = (rx cos(2 pi i / N), ry sin(2 pi i / N))."""
    ang = 2.0 * np.pi * np.arange(n_directions) / n_directions
    return np.column_stack([radii[0] * np.cos(ang), radii[1] * np.sin(ang)])


def force_directions(target: TargetSpec) -> np.ndarray:
    return ellipse_directions(target.force_radii, target.n_directions)


def velocity_directions(target: TargetSpec) -> np.ndarray:
    return ellipse_directions(target.velocity_radii, target.n_directions)


def gravity_center(model: RobotModel, q: np.ndarray) -> GravityCenter:
    """Minimum-norm tip force whose joint torque equals the gravity torque.

    Only needed for drawing the ellipse center; the LPs use the torque
    directly. Falls back to the least-squares minimum-norm solution at a
    singular J and reports the residual.
    """
    tau_g = gravity_torque(model, q)
    jt = joint_jacobian(model, q).T
    center, *_ = np.linalg.lstsq(jt, tau_g, rcond=None)
    residual = float(np.linalg.norm(jt @ center - tau_g))
    return GravityCenter(center, residual)


def _force_rhs(model: RobotModel, q: np.ndarray, target: TargetSpec, gravity: bool,
               gravity_rhs: str = "torque") -> np.ndarray:
    jt = joint_jacobian(model, q).T
    if not gravity:
        return jt @ target.force_center
    if gravity_rhs == "torque":
        return gravity_torque(model, q)
    if gravity_rhs == "center":
        return jt @ gravity_center(model, q).center
    raise ValueError(f"unknown gravity_rhs {gravity_rhs!r}")


def _clip_h(code: int, value: float, h_cap: float) -> float | None:
    if code == simplex.INFEASIBLE:
        return None
    if code == simplex.UNBOUNDED:
        return h_cap
    return min(value, h_cap)


def _force_h_all(G, jt, rhs, w_cols, limits, h_cap):
    """h for every force direction, or None at the first infeasible LP.

    Variables (h, f): -G^T f - h (J^T w_i) = rhs, f in its box, h >= 0.
    """
    m_wires = G.shape[0]
    n = 1 + m_wires
    a = np.empty((jt.shape[0], n))
    a[:, 1:] = -G.T
    c = np.zeros(n)
    c[0] = 1.0
    lo = np.empty(n)
    up = np.empty(n)
    lo[0], up[0] = 0.0, np.inf
    lo[1:], up[1:] = limits.f_min, limits.f_max
    out = np.empty(len(w_cols))
    for i, col in enumerate(w_cols):
        a[:, 0] = -col
        code, _, value = simplex.solve_arrays(a, rhs, c, lo, up)
        h = _clip_h(code, value, h_cap)
        if h is None:
            return None
        out[i] = h
    return out


def _velocity_h_all(G, J, w_dirs, limits, h_cap):
    """h for every velocity direction, or None at the first infeasible LP.

    Variables (h, qdot, y): J qdot = h w_i and y = G qdot with y boxed by the
    wire-speed limits; qdot carries a wide formal box.
    """
    m_wires, d = G.shape
    n = 1 + d + m_wires
    rows = 2 + m_wires
    a = np.zeros((rows, n))
    a[:2, 1 : 1 + d] = J
    a[2:, 1 : 1 + d] = G
    a[2:, 1 + d :] = -np.eye(m_wires)
    b = np.zeros(rows)
    c = np.zeros(n)
    c[0] = 1.0
    lo = np.empty(n)
    up = np.empty(n)
    lo[0], up[0] = 0.0, np.inf
    lo[1 : 1 + d], up[1 : 1 + d] = -_THETA_DOT_BOUND, _THETA_DOT_BOUND
    lo[1 + d :], up[1 + d :] = limits.ldot_min, limits.ldot_max
    out = np.empty(len(w_dirs))
    for i, w in enumerate(w_dirs):
        a[0, 0] = -w[0]
        a[1, 0] = -w[1]
        code, _, value = simplex.solve_arrays(a, b, c, lo, up)
        h = _clip_h(code, value, h_cap)
        if h is None:
            return None
        out[i] = h
    return out


def force_h(model, design, q, target, limits, direction: int, gravity: bool = False,
            h_cap: float = DEFAULT_H_CAP) -> float:
    """Coverage factor along force direction i; raises InfeasibleDesign on prune."""
    G = muscle_jacobian(model, design, q)
    jt = joint_jacobian(model, q).T
    rhs = _force_rhs(model, q, target, gravity)
    w = force_directions(target)[direction]
    hs = _force_h_all(G, jt, rhs, (jt @ w)[None, :], limits, h_cap)
    if hs is None:
        raise InfeasibleDesign(f"force LP infeasible in direction {direction}")
    return float(hs[0])


def velocity_h(model, design, q, target, limits, direction: int,
               h_cap: float = DEFAULT_H_CAP) -> float:
    """Coverage factor along velocity direction i; raises InfeasibleDesign on prune."""
    G = muscle_jacobian(model, design, q)
    J = joint_jacobian(model, q)
    w = velocity_directions(target)[direction]
    hs = _velocity_h_all(G, J, w[None, :], limits, h_cap)
    if hs is None:
        raise InfeasibleDesign(f"velocity LP infeasible in direction {direction}")
    return float(hs[0])


class _StateTables(NamedTuple):
    """Design-independent pieces of one evaluated joint state."""

    q: np.ndarray
    J: np.ndarray
    jt: np.ndarray
    rhs: np.ndarray
    force_cols: np.ndarray  # J^T w_i, one row per direction
    velocity_dirs: np.ndarray


def _scenario_tables(model: RobotModel, scenario: Scenario,
                     gravity_rhs: str = "torque") -> list[_StateTables]:
    wf = force_directions(scenario.target)
    wv = velocity_directions(scenario.target)
    tables = []
    for q in scenario.joint_states:
        J = joint_jacobian(model, q)
        jt = J.T
        rhs = _force_rhs(model, q, scenario.target, scenario.gravity, gravity_rhs)
        tables.append(_StateTables(q, J, jt, rhs, wf @ J, wv))
    return tables


def _evaluate_tables(model, design, scenario, tables) -> EvaluationResult:
    constant = isinstance(design, ConstantArrangement)
    G = muscle_jacobian(model, design, tables[0].q) if constant else None
    h_force, h_velocity = [], []
    for t in tables:
        Gq = G if constant else muscle_jacobian(model, design, t.q)
        hf = _force_h_all(Gq, t.jt, t.rhs, t.force_cols, scenario.limits, scenario.h_cap)
        if hf is None:
            return EvaluationResult(feasible=False)
        hv = _velocity_h_all(Gq, t.J, t.velocity_dirs, scenario.limits, scenario.h_cap)
        if hv is None:
            return EvaluationResult(feasible=False)
        h_force.append(hf)
        h_velocity.append(hv)
    e_force = float(sum(np.maximum(1.0 - hf, 0.0).sum() for hf in h_force))
    e_velocity = float(sum(np.maximum(1.0 - hv, 0.0).sum() for hv in h_velocity))
    return EvaluationResult(True, h_force, h_velocity, e_force, e_velocity)


def evaluate(model: RobotModel, design: WireArrangement, scenario: Scenario,
             gravity_rhs: str = "torque") -> EvaluationResult:
    """Score a design over all evaluated joint states.

    gravity_rhs selects how the gravity-mode LP right-hand side is formed:
    "torque" uses the gravity torque directly, "center" routes it through the
    minimum-norm ellipse center; the two agree whenever J is invertible.
    """
    tables = _scenario_tables(model, scenario, gravity_rhs)
    return _evaluate_tables(model, design, scenario, tables)


def make_evaluator(model: RobotModel, scenario: Scenario):
    """Closure evaluating designs against precomputed per-state tables."""
    tables = _scenario_tables(model, scenario)

    def run(design: WireArrangement) -> EvaluationResult:
        return _evaluate_tables(model, design, scenario, tables)

    return run


def trace_polygon(model, design, q, which: str, limits, n_rays: int = 64,
                  center=(0.0, 0.0), gravity: bool = False,
                  ray_cap: float = 1e6) -> np.ndarray:
    """Boundary of the feasible force or velocity set by LP ray casting.

    Rays leave the anchor (force: the ellipse center, velocity: the origin)
    in n_rays uniform directions; each boundary point is anchor + h * dir.
    Unbounded directions stop at ray_cap. Raises InfeasibleDesign when the
    anchor itself is not reachable.
    """
    if n_rays < 8:
        raise ValueError("need at least 8 rays")
    if which not in ("force", "velocity"):
        raise ValueError("which must be 'force' or 'velocity'")
    ang = 2.0 * np.pi * np.arange(n_rays) / n_rays
    dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    G = muscle_jacobian(model, design, q)
    J = joint_jacobian(model, q)
    if which == "force":
        anchor = np.asarray(center, dtype=float)
        if gravity:
            rhs = gravity_torque(model, q)
            anchor = gravity_center(model, q).center
        else:
            rhs = J.T @ anchor
        hs = _force_h_all(G, J.T, rhs, dirs @ J, limits, ray_cap)
    else:
        anchor = np.zeros(2)
        hs = _velocity_h_all(G, J, dirs, limits, ray_cap)
    if hs is None:
        raise InfeasibleDesign(f"{which} anchor unreachable at q={q}")
    return anchor + hs[:, None] * dirs
