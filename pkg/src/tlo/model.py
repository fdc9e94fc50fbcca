"""Planar serial-chain kinematics for a tendon-driven manipulator.

The robot is a fixed base link (LINK_0) followed by D revolute joints and
D movable links, all in the x-y plane. LINK_0 lies along the world +x axis
from the origin; joint k rotates link k counterclockwise (z out of plane).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_SEGMENT_X_TOL = 1e-9


def rot90(v: np.ndarray) -> np.ndarray:
    """Rotate a 2-vector (or an array of them, last axis 2) by +90 degrees."""
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def default_attach_segments(link_lengths) -> np.ndarray:
    """Full-centerline attach segments: (0,0) to (L,0) in each link frame."""
    lengths = np.asarray(link_lengths, dtype=float)
    segs = np.zeros((len(lengths), 2, 2))
    segs[:, 1, 0] = lengths
    return segs


@dataclass
class RobotModel:
    """Geometry and inertial data of the planar chain.

    link_lengths has D+1 entries (LINK_0..LINK_D), meters. link_masses is
    aligned with it; the LINK_0 mass is never used. attach_segments gives,
    per link, the two endpoints (in the link frame) of the straight segment
    that wire relay points may occupy. moment_arm_ranges is only consulted
    for constant-moment-arm designs: per joint, the (start, end) arm values
    in meters that fractions 0 and 1 map to.
    """

    link_lengths: np.ndarray
    link_masses: np.ndarray
    attach_segments: np.ndarray = None
    gravity: np.ndarray = field(default_factory=lambda: np.array([0.0, -9.81]))
    moment_arm_ranges: np.ndarray | None = None

    def __post_init__(self):
        self.link_lengths = np.asarray(self.link_lengths, dtype=float)
        self.link_masses = np.asarray(self.link_masses, dtype=float)
        if self.link_lengths.ndim != 1 or len(self.link_lengths) < 2:
            raise ValueError("need LINK_0 plus at least one movable link")
        if np.any(self.link_lengths <= 0):
            raise ValueError("link lengths must be positive")
        if len(self.link_masses) != len(self.link_lengths):
            raise ValueError("link_masses must align with link_lengths")
        if np.any(self.link_masses < 0):
            raise ValueError("link masses must be non-negative")
        if self.attach_segments is None:
            self.attach_segments = default_attach_segments(self.link_lengths)
        self.attach_segments = np.asarray(self.attach_segments, dtype=float)
        if self.attach_segments.shape != (len(self.link_lengths), 2, 2):
            raise ValueError("attach_segments must be (D+1, 2, 2)")
        for d, seg in enumerate(self.attach_segments):
            limit = self.link_lengths[d] + _SEGMENT_X_TOL
            if np.any(np.abs(seg[:, 0]) > limit):
                raise ValueError(f"attach segment of link {d} extends past the link")
        self.gravity = np.asarray(self.gravity, dtype=float)
        if self.gravity.shape != (2,):
            raise ValueError("gravity must be a 2-vector")
        if self.moment_arm_ranges is not None:
            self.moment_arm_ranges = np.asarray(self.moment_arm_ranges, dtype=float)
            if self.moment_arm_ranges.shape != (self.n_joints, 2):
                raise ValueError("moment_arm_ranges must be (D, 2)")

    @property
    def n_joints(self) -> int:
        return len(self.link_lengths) - 1


@dataclass
class Pose:
    """World-frame placement of every link at a given joint state.

    link_angles[d] / link_origins[d] define link d's frame: a local point p
    maps to origin + R(angle) p. joint_positions[k] is revolute joint k+1,
    i.e. the origin of link k+1. ee_position is the tip of the last link.
    """

    link_angles: np.ndarray
    link_origins: np.ndarray
    joint_positions: np.ndarray
    ee_position: np.ndarray

    def world_point(self, link: int, local: np.ndarray) -> np.ndarray:
        a = self.link_angles[link]
        c, s = np.cos(a), np.sin(a)
        x, y = local
        return self.link_origins[link] + np.array([c * x - s * y, s * x + c * y])


def forward_kinematics(model: RobotModel, q: np.ndarray) -> Pose:
    """Pose of every link for joint angles q (radians, length D)."""
    q = np.asarray(q, dtype=float)
    d = model.n_joints
    if q.shape != (d,):
        raise ValueError(f"expected {d} joint angles, got shape {q.shape}")
    angles = np.zeros(d + 1)
    angles[1:] = np.cumsum(q)
    origins = np.zeros((d + 1, 2))
    for k in range(1, d + 1):
        a = angles[k - 1]
        origins[k] = origins[k - 1] + model.link_lengths[k - 1] * np.array(
            [np.cos(a), np.sin(a)]
        )
    ee = origins[d] + model.link_lengths[d] * np.array(
        [np.cos(angles[d]), np.sin(angles[d])]
    )
    return Pose(angles, origins, origins[1:], ee)


def joint_jacobian(model: RobotModel, q: np.ndarray) -> np.ndarray:
    """2xD Jacobian of the end-effector position wrt joint angles."""
    pose = forward_kinematics(model, q)
    return rot90(pose.ee_position - pose.joint_positions).T


def link_centers_of_mass(model: RobotModel, pose: Pose) -> np.ndarray:
    """World COM of each movable link (midpoint, uniform density), (D, 2)."""
    d = model.n_joints
    coms = np.empty((d, 2))
    for k in range(1, d + 1):
        a = pose.link_angles[k]
        coms[k - 1] = pose.link_origins[k] + 0.5 * model.link_lengths[k] * np.array(
            [np.cos(a), np.sin(a)]
        )
    return coms


def potential_energy(model: RobotModel, q: np.ndarray) -> float:
    """Gravitational potential energy of the movable links."""
    pose = forward_kinematics(model, q)
    coms = link_centers_of_mass(model, pose)
    return float(np.sum(model.link_masses[1:] * (-(coms @ model.gravity))))


def gravity_torque(model: RobotModel, q: np.ndarray) -> np.ndarray:
    """Joint torque that holds the pose statically against gravity.

    Equals the gradient of potential_energy wrt the joint angles.
    """
    pose = forward_kinematics(model, q)
    coms = link_centers_of_mass(model, pose)
    d = model.n_joints
    tau = np.zeros(d)
    for k in range(d):
        # joint k moves links k+1..D
        arms = rot90(coms[k:] - pose.joint_positions[k])
        tau[k] = np.sum(model.link_masses[k + 1 :] * (-(arms @ model.gravity)))
    return tau
