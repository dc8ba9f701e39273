"""
Gridworld: walk from the bottom-left corner to an observed goal cell with a
noisy localizer; trap cells make moves unreliable.
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.domains.domain_model import GOAL_REWARD, DomainEnum, GridActionEnum
from fbapomcp.domains.domain_utils import (
    KNOWN_CONFIDENCE,
    build_dynamics,
    build_node_priors,
    localizer_row,
    move_row,
    one_hot,
)
from fbapomcp.models.prior_base import PriorSpec
from fbapomcp.models.topology import EdgeConstraints, Topology
from fbapomcp.pomdp.domain_base import DomainSpec
from fbapomcp.pomdp.space import FactoredSpace, FeatureVector


X, Y, GOAL = 0, 1, 2
OBS_X, OBS_Y, OBS_GOAL = 3, 4, 5
START = (0, 0)

SUCCESS = 0.95
TRAP_SUCCESS = 0.15
LOCALIZER_ACCURACY = 0.9
PRIOR_CONFIDENCE = 10.0

MOVES = {
    GridActionEnum.UP: (0, 1),
    GridActionEnum.DOWN: (0, -1),
    GridActionEnum.LEFT: (-1, 0),
    GridActionEnum.RIGHT: (1, 0),
}

Cell = Tuple[int, int]


def default_goal_candidates(size: int) -> Tuple[Cell, ...]:
    last = size - 1
    return ((last, 0), (0, last), (last, last), (size // 2, size // 2))


def default_traps(size: int) -> Tuple[Cell, ...]:
    return ((size // 2, 1), (size // 2, size - 2))


class GoalReached:
    """
    Reward and terminal predicate: the agent stands on the goal cell after the step.
    """

    def __init__(self, candidates: Sequence[Cell]):
        self.candidates = tuple(candidates)

    def __call__(self, state: FeatureVector, action: int, next_state: FeatureVector) -> bool:
        return (next_state[X], next_state[Y]) == self.candidates[next_state[GOAL]]

    def reward(self, state: FeatureVector, action: int, next_state: FeatureVector) -> float:
        return GOAL_REWARD if self(state, action, next_state) else 0.0


def _check_cells(cells: Sequence[Cell], size: int, label: str):
    for x, y in cells:
        if not (0 <= x < size and 0 <= y < size):
            raise InvalidArgumentError(f"{label} cell {(x, y)} lies outside the {size}x{size} grid")


def make_gridworld(
    size: int = 5,
    goal_candidates: Optional[Sequence[Cell]] = None,
    traps: Optional[Sequence[Cell]] = None,
    discount: float = 0.95,
    horizon: int = 30,
    localizer_accuracy: float = LOCALIZER_ACCURACY,
    prior_confidence: float = PRIOR_CONFIDENCE,
) -> Tuple[DomainSpec, PriorSpec]:
    if size < 2:
        raise InvalidArgumentError(f"Grid size must be >= 2, got {size}")
    candidates = tuple(tuple(c) for c in (goal_candidates or default_goal_candidates(size)))
    trap_cells = frozenset(tuple(c) for c in (default_traps(size) if traps is None else traps))
    _check_cells(candidates, size, "Goal")
    _check_cells(trap_cells, size, "Trap")
    if len(candidates) < 2:
        raise InvalidArgumentError("At least two goal candidates are required")
    if START in candidates:
        raise InvalidArgumentError(f"The start cell {START} cannot be a goal")

    state_space = FactoredSpace.from_arities([("x", size), ("y", size), ("goal", len(candidates))])
    observation_space = FactoredSpace.from_arities(
        [("obs_x", size), ("obs_y", size), ("obs_goal", len(candidates))]
    )

    def rows(trap_success: float):
        def row(action: int, node: int, values: dict) -> np.ndarray:
            if node in (X, Y):
                cell = (values[X], values[Y])
                success = trap_success if cell in trap_cells else SUCCESS
                return move_row(values[node], MOVES[GridActionEnum(action)][node], size, success)
            if node in (GOAL, OBS_GOAL):
                return one_hot(values[GOAL], len(candidates))
            return localizer_row(values[node - OBS_X], size, localizer_accuracy)

        return row

    per_action = [[(X, Y), (X, Y), (GOAL,), (X,), (Y,), (GOAL,)]] * len(GridActionEnum)
    true_topology = Topology.from_lists(state_space, observation_space, per_action)
    initial = np.zeros(state_space.size)
    for goal in range(len(candidates)):
        initial[state_space.index((*START, goal))] = 1.0 / len(candidates)

    goal_reached = GoalReached(candidates)
    domain = DomainSpec(
        name=DomainEnum.GRIDWORLD.value,
        state_space=state_space,
        observation_space=observation_space,
        action_count=len(GridActionEnum),
        reward=goal_reached.reward,
        terminal=goal_reached,
        dynamics=build_dynamics(true_topology, rows(TRAP_SUCCESS)),
        initial_state_probs=initial,
        discount=discount,
        horizon=horizon,
        action_names=[a.name.lower() for a in GridActionEnum],
        reward_span=GOAL_REWARD,
    )

    mutable = tuple(
        tuple((GOAL,) if node in (X, Y) else () for node in range(OBS_GOAL + 1))
        for _ in GridActionEnum
    )
    # a particle either models the goal's influence on movement everywhere or nowhere
    goal_edges = tuple((int(a), node, GOAL) for a in GridActionEnum for node in (X, Y))
    prior = PriorSpec(
        state_space=state_space,
        observation_space=observation_space,
        initial_state_probs=initial,
        constraints=EdgeConstraints(true_topology, mutable, (goal_edges,)),
        reference_topology=true_topology,
        node_priors=build_node_priors(
            true_topology,
            rows(SUCCESS),
            lambda a, node: prior_confidence if node in (X, Y) else KNOWN_CONFIDENCE,
        ),
        flat_confidence=prior_confidence,
    )
    return domain, prior
