from typing import Callable, Dict, Tuple

import numpy as np

from fbapomcp.models.factored_counts import FactoredCounts, configuration_values
from fbapomcp.models.factored_service import FactoredDynamics
from fbapomcp.models.prior_base import NodePrior
from fbapomcp.models.topology import ParentSet, Topology


# Dirichlet mass of model parts the agent is told outright
KNOWN_CONFIDENCE = 1e4

RowFn = Callable[[int, int, Dict[int, int]], np.ndarray]
"""(action, node, {parent feature: value}) -> distribution over the node's values"""


def one_hot(value: int, arity: int) -> np.ndarray:
    row = np.zeros(arity)
    row[value] = 1.0
    return row


def uniform(arity: int) -> np.ndarray:
    return np.full(arity, 1.0 / arity)


def move_row(position: int, delta: int, arity: int, success: float) -> np.ndarray:
    """
    Intended move succeeds with ``success``, otherwise stays; walls block the move.
    """
    target = position + delta
    if delta == 0 or not 0 <= target < arity:
        return one_hot(position, arity)
    row = np.zeros(arity)
    row[target] = success
    row[position] = 1.0 - success
    return row


def drift_row(position: int, arity: int, stay: float, up: float, down: float) -> np.ndarray:
    """
    Random +1 / -1 drift; a drift off the grid becomes a stay.
    """
    row = np.zeros(arity)
    row[position] += stay
    row[position + 1 if position + 1 < arity else position] += up
    row[position - 1 if position - 1 >= 0 else position] += down
    return row


def localizer_row(value: int, arity: int, accuracy: float) -> np.ndarray:
    """
    Reports ``value`` with ``accuracy``, otherwise a uniformly chosen in-range neighbour.
    """
    neighbours = [v for v in (value - 1, value + 1) if 0 <= v < arity]
    row = np.zeros(arity)
    row[value] = accuracy
    for v in neighbours:
        row[v] += (1.0 - accuracy) / len(neighbours)
    return row


def node_table(
    action: int,
    node: int,
    parent_set: ParentSet,
    state_arities: Tuple[int, ...],
    row_fn: RowFn,
) -> np.ndarray:
    values = configuration_values(parent_set, state_arities)
    return np.stack(
        [row_fn(action, node, dict(zip(parent_set, config))) for config in values]
    )


def build_dynamics(topology: Topology, row_fn: RowFn) -> FactoredDynamics:
    return FactoredDynamics(
        topology,
        FactoredCounts(
            [
                [
                    node_table(a, node, topology.parents[a][node], topology.state_arities, row_fn)
                    for node in range(topology.num_nodes)
                ]
                for a in range(topology.num_actions)
            ]
        ),
    )


def build_node_priors(
    topology: Topology,
    row_fn: RowFn,
    confidence: Callable[[int, int], float],
) -> Tuple[Tuple[NodePrior, ...], ...]:
    return tuple(
        tuple(
            NodePrior(
                topology.parents[a][node],
                node_table(a, node, topology.parents[a][node], topology.state_arities, row_fn),
                confidence(a, node),
            )
            for node in range(topology.num_nodes)
        )
        for a in range(topology.num_actions)
    )
