"""
Factored Tiger: the classic tiger problem padded with uninformative binary
state features. Only the listen observation's parents are uncertain.
"""

from typing import Tuple

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.domains.domain_model import TIGER_REWARDS, DomainEnum, TigerActionEnum
from fbapomcp.domains.domain_utils import (
    KNOWN_CONFIDENCE,
    build_dynamics,
    build_node_priors,
    one_hot,
    uniform,
)
from fbapomcp.models.prior_base import PriorSpec
from fbapomcp.models.topology import EdgeConstraints, Topology
from fbapomcp.pomdp.domain_base import DomainSpec
from fbapomcp.pomdp.space import FactoredSpace, FeatureVector


TIGER = 0
HEAR_LEFT, HEAR_RIGHT = 0, 1
TRUE_ACCURACY = 0.85
PRIOR_ACCURACY = 0.6
PRIOR_CONFIDENCE = 10.0


def tiger_reward(state: FeatureVector, action: int, next_state: FeatureVector) -> float:
    if action == TigerActionEnum.LISTEN:
        return TIGER_REWARDS["listen"]
    # tiger == 0 means the tiger is behind the left door
    opened_tiger = (action == TigerActionEnum.OPEN_LEFT) == (state[TIGER] == 0)
    return TIGER_REWARDS["tiger"] if opened_tiger else TIGER_REWARDS["gold"]


def tiger_terminal(state: FeatureVector, action: int, next_state: FeatureVector) -> bool:
    return action != TigerActionEnum.LISTEN


def _topology(
    state_space: FactoredSpace, observation_space: FactoredSpace, listen_parents: Tuple[int, ...]
) -> Topology:
    n = state_space.num_features
    parents = []
    for action in TigerActionEnum:
        nodes = [(i,) for i in range(n)]
        nodes.append(listen_parents if action == TigerActionEnum.LISTEN else ())
        parents.append(nodes)
    return Topology.from_lists(state_space, observation_space, parents)


def make_factored_tiger(
    n_dummy: int = 7,
    discount: float = 0.95,
    horizon: int = 30,
    true_accuracy: float = TRUE_ACCURACY,
    prior_accuracy: float = PRIOR_ACCURACY,
    prior_confidence: float = PRIOR_CONFIDENCE,
) -> Tuple[DomainSpec, PriorSpec]:
    if n_dummy < 0:
        raise InvalidArgumentError(f"n_dummy must be >= 0, got {n_dummy}")
    state_space = FactoredSpace.from_arities(
        [("tiger", 2)] + [(f"dummy_{i + 1}", 2) for i in range(n_dummy)]
    )
    observation_space = FactoredSpace.from_arities([("hear", 2)])
    n = state_space.num_features
    listen_node = n

    def rows(accuracy: float):
        def row(action: int, node: int, values: dict) -> np.ndarray:
            if node != listen_node:
                return one_hot(values[node], 2)
            if action != TigerActionEnum.LISTEN or TIGER not in values:
                return uniform(2)
            heard = HEAR_LEFT if values[TIGER] == 0 else HEAR_RIGHT
            return accuracy * one_hot(heard, 2) + (1 - accuracy) * one_hot(1 - heard, 2)

        return row

    true_topology = _topology(state_space, observation_space, (TIGER,))
    domain = DomainSpec(
        name=DomainEnum.TIGER.value,
        state_space=state_space,
        observation_space=observation_space,
        action_count=len(TigerActionEnum),
        reward=tiger_reward,
        terminal=tiger_terminal,
        dynamics=build_dynamics(true_topology, rows(true_accuracy)),
        initial_state_probs=np.full(state_space.size, 1.0 / state_space.size),
        discount=discount,
        horizon=horizon,
        action_names=[a.name.lower() for a in TigerActionEnum],
        reward_span=TIGER_REWARDS["gold"] - TIGER_REWARDS["tiger"],
    )

    required = _topology(state_space, observation_space, ())
    mutable = tuple(
        tuple(
            tuple(range(n)) if node == listen_node and action == TigerActionEnum.LISTEN else ()
            for node in range(n + 1)
        )
        for action in TigerActionEnum
    )
    prior = PriorSpec(
        state_space=state_space,
        observation_space=observation_space,
        initial_state_probs=domain.initial_state_probs,
        constraints=EdgeConstraints(required, mutable),
        reference_topology=true_topology,
        node_priors=build_node_priors(
            true_topology,
            rows(prior_accuracy),
            lambda a, node: (
                prior_confidence
                if node == listen_node and a == TigerActionEnum.LISTEN
                else KNOWN_CONFIDENCE
            ),
        ),
        flat_confidence=prior_confidence,
    )
    return domain, prior
