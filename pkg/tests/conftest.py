from __future__ import annotations

import numpy as np
import pytest

from tlo.arrangement import ConstantArrangement, RelayPoint, VariableArrangement
from tlo.feasibility import ActuatorLimits, Scenario, TargetSpec
from tlo.model import RobotModel

PAPER_LENGTHS = [0.4, 0.6, 0.6]
PAPER_MASSES = [0.0, 4.0, 4.0]
PAPER_ARM_RANGES = [[-0.1, 0.1], [-0.1, 0.1]]
DEFAULT_STATES_DEG = [[15.0, 30.0], [30.0, 45.0], [45.0, 60.0], [60.0, 75.0]]


@pytest.fixture
def paper_model() -> RobotModel:
    return RobotModel(PAPER_LENGTHS, PAPER_MASSES, moment_arm_ranges=PAPER_ARM_RANGES)


@pytest.fixture
def paper_limits() -> ActuatorLimits:
    return ActuatorLimits(10.0, 200.0, -0.4, 0.4)


@pytest.fixture
def default_states() -> list[np.ndarray]:
    return [np.deg2rad(s) for s in DEFAULT_STATES_DEG]


@pytest.fixture
def zero_center_target() -> TargetSpec:
    return TargetSpec([0.0, 0.0], [40.0, 40.0], [1.0, 1.0], 8)


@pytest.fixture
def zero_center_scenario(paper_limits, default_states, zero_center_target) -> Scenario:
    return Scenario(paper_limits, zero_center_target, default_states)


def random_variable_design(rng: np.random.Generator, m=3, n=3, d=2) -> VariableArrangement:
    wires = []
    for _ in range(m):
        pts = [RelayPoint(0, float(rng.random()))]
        pts += [
            RelayPoint(int(rng.integers(0, d + 1)), float(rng.random())) for _ in range(n - 1)
        ]
        wires.append(pts)
    return VariableArrangement(wires)


def random_constant_design(rng: np.random.Generator, m=4, d=2) -> ConstantArrangement:
    return ConstantArrangement(rng.random((m, d)))


def all_on_base_design(m=3) -> VariableArrangement:
    return VariableArrangement(
        [[RelayPoint(0, 0.1 + 0.2 * i), RelayPoint(0, 0.9 - 0.1 * i)] for i in range(m)]
    )


def worked_constant_design() -> ConstantArrangement:
    # arm rows (0.1, 0), (-0.1, 0), (0, 0.1), (0, -0.1) under ranges [-0.1, 0.1]
    arms = np.array([[0.1, 0.0], [-0.1, 0.0], [0.0, 0.1], [0.0, -0.1]])
    return ConstantArrangement((arms + 0.1) / 0.2)
