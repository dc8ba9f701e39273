"""
Collision Avoidance: a plane flies right to left one column per step and must
dodge an obstacle drifting up and down the last column.
"""

from typing import Tuple

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.domains.domain_model import COLLISION_REWARDS, CollisionActionEnum, DomainEnum
from fbapomcp.domains.domain_utils import (
    KNOWN_CONFIDENCE,
    build_dynamics,
    build_node_priors,
    drift_row,
    localizer_row,
    one_hot,
)
from fbapomcp.models.prior_base import PriorSpec
from fbapomcp.models.topology import EdgeConstraints, Topology
from fbapomcp.pomdp.domain_base import DomainSpec
from fbapomcp.pomdp.space import FactoredSpace, FeatureVector


PLANE_X, PLANE_Y, OBSTACLE_Y = 0, 1, 2
OBSTACLE_NODE = OBSTACLE_Y
OBSERVATION_NODE = 3

TRUE_DRIFT = (0.5, 0.25, 0.25)
PRIOR_DRIFT = (0.9, 0.05, 0.05)
OBSERVATION_ACCURACY = 0.8
PRIOR_CONFIDENCE = 10.0

VERTICAL_MOVES = {
    CollisionActionEnum.STAY: 0,
    CollisionActionEnum.UP: 1,
    CollisionActionEnum.DOWN: -1,
}


def collision_reward(state: FeatureVector, action: int, next_state: FeatureVector) -> float:
    reward = 0.0 if action == CollisionActionEnum.STAY else COLLISION_REWARDS["diagonal"]
    if next_state[PLANE_X] == 0 and next_state[PLANE_Y] == next_state[OBSTACLE_Y]:
        reward += COLLISION_REWARDS["collision"]
    return reward


def collision_terminal(state: FeatureVector, action: int, next_state: FeatureVector) -> bool:
    return next_state[PLANE_X] == 0


def make_collision_avoidance(
    width: int = 5,
    height: int = 5,
    discount: float = 0.95,
    horizon: int = 30,
    observation_accuracy: float = OBSERVATION_ACCURACY,
    prior_confidence: float = PRIOR_CONFIDENCE,
) -> Tuple[DomainSpec, PriorSpec]:
    if width < 2 or height < 3 or height % 2 == 0:
        raise InvalidArgumentError(
            f"Collision Avoidance needs width >= 2 and odd height >= 3, got {width}x{height}"
        )
    state_space = FactoredSpace.from_arities(
        [("plane_x", width), ("plane_y", height), ("obstacle_y", height)]
    )
    observation_space = FactoredSpace.from_arities([("obstacle_obs", height)])

    def parents(obstacle_parents: Tuple[int, ...]) -> Topology:
        per_action = [[(PLANE_X,), (PLANE_Y,), obstacle_parents, (OBSTACLE_Y,)]] * len(
            CollisionActionEnum
        )
        return Topology.from_lists(state_space, observation_space, per_action)

    def rows(drift: Tuple[float, float, float]):
        def row(action: int, node: int, values: dict) -> np.ndarray:
            if node == PLANE_X:
                return one_hot(max(values[PLANE_X] - 1, 0), width)
            if node == PLANE_Y:
                move = VERTICAL_MOVES[CollisionActionEnum(action)]
                return one_hot(min(max(values[PLANE_Y] + move, 0), height - 1), height)
            if node == OBSTACLE_NODE:
                return drift_row(values[OBSTACLE_Y], height, *drift)
            return localizer_row(values[OBSTACLE_Y], height, observation_accuracy)

        return row

    true_topology = parents((OBSTACLE_Y,))
    initial = np.zeros(state_space.size)
    for obstacle in range(height):
        initial[state_space.index((width - 1, height // 2, obstacle))] = 1.0 / height

    domain = DomainSpec(
        name=DomainEnum.COLLISION.value,
        state_space=state_space,
        observation_space=observation_space,
        action_count=len(CollisionActionEnum),
        reward=collision_reward,
        terminal=collision_terminal,
        dynamics=build_dynamics(true_topology, rows(TRUE_DRIFT)),
        initial_state_probs=initial,
        discount=discount,
        horizon=horizon,
        action_names=[a.name.lower() for a in CollisionActionEnum],
        reward_span=-COLLISION_REWARDS["collision"] - COLLISION_REWARDS["diagonal"],
    )

    mutable = tuple(
        tuple((PLANE_X, PLANE_Y) if node == OBSTACLE_NODE else () for node in range(OBSERVATION_NODE + 1))
        for _ in CollisionActionEnum
    )
    prior = PriorSpec(
        state_space=state_space,
        observation_space=observation_space,
        initial_state_probs=initial,
        constraints=EdgeConstraints(true_topology, mutable),
        reference_topology=true_topology,
        node_priors=build_node_priors(
            true_topology,
            rows(PRIOR_DRIFT),
            lambda a, node: prior_confidence if node == OBSTACLE_NODE else KNOWN_CONFIDENCE,
        ),
        flat_confidence=prior_confidence,
    )
    return domain, prior
