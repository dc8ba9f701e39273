"""
FBA-POMDP operations: expected factored dynamics, the simulation step,
transition counting and the Bayesian-Dirichlet structure score.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from fbapomcp.common.exceptions import (
    DegeneratePriorError,
    InvalidPriorError,
    ModelInconsistencyError,
)
from fbapomcp.common.sampling_utils import sample_categorical
from fbapomcp.models.factored_counts import (
    FactoredCounts,
    NodeKey,
    SufficientStats,
    configuration_index,
    configuration_indices,
)
from fbapomcp.models.topology import ParentSet, Topology
from fbapomcp.pomdp.history import AnnotatedEpisode, TransitionBatch
from fbapomcp.pomdp.space import FeatureVector


Increment = Tuple[NodeKey, int]


def _node_row(
    topology: Topology, counts: FactoredCounts, action: int, node: int, config: int
) -> np.ndarray:
    try:
        table = counts.tables[action][node]
    except IndexError:
        raise ModelInconsistencyError(
            f"Counts have no table for action {action}, node {node}"
        )
    if table.shape != (topology.num_configurations(action, node), topology.node_arity(node)):
        raise ModelInconsistencyError(
            f"Table (a={action}, node={node}) has shape {table.shape}, "
            f"topology requires {(topology.num_configurations(action, node), topology.node_arity(node))}"
        )
    row = counts.row((action, node, config))
    if row.sum() <= 0:
        raise DegeneratePriorError(
            f"CPT row (a={action}, node={node}, config={config}) has no positive mass"
        )
    return row


def _node_context(topology: Topology, node: int, state, next_state) -> Sequence[int]:
    return next_state if topology.is_observation_node(node) else state


def _node_value(topology: Topology, node: int, next_state, observation) -> int:
    n = topology.num_state_features
    return observation[node - n] if node >= n else next_state[node]


def _likelihood_over(
    topology: Topology,
    counts: FactoredCounts,
    nodes: Iterable[int],
    state: FeatureVector,
    action: int,
    next_state: FeatureVector,
    observation: Optional[FeatureVector],
) -> float:
    probability = 1.0
    for node in nodes:
        parents = topology.parents[action][node]
        config = configuration_index(
            parents, _node_context(topology, node, state, next_state), topology.state_arities
        )
        row = _node_row(topology, counts, action, node, config)
        probability *= row[_node_value(topology, node, next_state, observation)] / row.sum()
    return float(probability)


def factored_likelihood(
    topology: Topology,
    counts: FactoredCounts,
    state: FeatureVector,
    action: int,
    next_state: FeatureVector,
    observation: FeatureVector,
) -> float:
    """
    Expected joint probability of (s', o) given (s, a): the product of the
    expected CPT entries of every output node.
    """
    return _likelihood_over(
        topology, counts, range(topology.num_nodes), state, action, next_state, observation
    )


def transition_likelihood(
    topology: Topology,
    counts: FactoredCounts,
    state: FeatureVector,
    action: int,
    next_state: FeatureVector,
) -> float:
    return _likelihood_over(
        topology, counts, range(topology.num_state_features), state, action, next_state, None
    )


def observation_likelihood(
    topology: Topology,
    counts: FactoredCounts,
    action: int,
    next_state: FeatureVector,
    observation: FeatureVector,
) -> float:
    nodes = range(topology.num_state_features, topology.num_nodes)
    return _likelihood_over(topology, counts, nodes, (), action, next_state, observation)


def _sample_nodes(
    topology: Topology,
    counts: FactoredCounts,
    nodes: Iterable[int],
    context: Sequence[int],
    action: int,
    rng: np.random.Generator,
) -> Tuple[List[int], List[Increment]]:
    values, increments = [], []
    for node in nodes:
        config = configuration_index(
            topology.parents[action][node], context, topology.state_arities
        )
        value = sample_categorical(_node_row(topology, counts, action, node, config), rng)
        values.append(value)
        increments.append(((action, node, config), value))
    return values, increments


def sample_next_state(
    topology: Topology,
    counts: FactoredCounts,
    state: FeatureVector,
    action: int,
    rng: np.random.Generator,
) -> Tuple[FeatureVector, List[Increment]]:
    values, increments = _sample_nodes(
        topology, counts, range(topology.num_state_features), state, action, rng
    )
    return tuple(values), increments


def sample_observation(
    topology: Topology,
    counts: FactoredCounts,
    action: int,
    next_state: FeatureVector,
    rng: np.random.Generator,
) -> Tuple[FeatureVector, List[Increment]]:
    nodes = range(topology.num_state_features, topology.num_nodes)
    values, increments = _sample_nodes(topology, counts, nodes, next_state, action, rng)
    return tuple(values), increments


def transition_increments(
    topology: Topology,
    state: FeatureVector,
    action: int,
    next_state: FeatureVector,
    observation: FeatureVector,
) -> List[Increment]:
    """
    The n+m (node, parent configuration, value) cells a transition adds to.
    """
    increments = []
    for node in range(topology.num_nodes):
        config = configuration_index(
            topology.parents[action][node],
            _node_context(topology, node, state, next_state),
            topology.state_arities,
        )
        increments.append(
            ((action, node, config), _node_value(topology, node, next_state, observation))
        )
    return increments


def fba_pomcp_step(
    state: FeatureVector,
    topology: Topology,
    counts: FactoredCounts,
    action: int,
    rng: np.random.Generator,
) -> Tuple[FeatureVector, FactoredCounts, FeatureVector]:
    """
    Sample s' node by node, then o given s', and add one count per output node.

    The topology is static: it is returned to callers unchanged.
    """
    next_state, state_increments = sample_next_state(topology, counts, state, action, rng)
    observation, observation_increments = sample_observation(
        topology, counts, action, next_state, rng
    )
    updated = counts.incremented(state_increments + observation_increments)
    return next_state, updated, observation


def tally_node(
    batch: TransitionBatch,
    topology: Topology,
    action: int,
    node: int,
    parent_set: Optional[ParentSet] = None,
) -> np.ndarray:
    """
    Occurrence counts N[e, v] of node values given parent configurations,
    optionally under a parent set other than the topology's.
    """
    parents = topology.parents[action][node] if parent_set is None else parent_set
    arity = topology.node_arity(node)
    num_configs = 1
    for parent in parents:
        num_configs *= topology.state_arities[parent]
    mask = batch.actions == action
    if topology.is_observation_node(node):
        context = batch.next_states[mask]
        values = batch.observations[mask][:, node - topology.num_state_features]
    else:
        context = batch.states[mask]
        values = batch.next_states[mask][:, node]
    configs = configuration_indices(parents, context, topology.state_arities)
    flat = np.bincount(configs * arity + values, minlength=num_configs * arity)
    return flat.reshape(num_configs, arity).astype(float)


def tally_transitions(batch: TransitionBatch, topology: Topology) -> SufficientStats:
    return FactoredCounts(
        [
            [tally_node(batch, topology, a, node) for node in range(topology.num_nodes)]
            for a in range(topology.num_actions)
        ]
    )


def count_transitions(
    episodes: Sequence[AnnotatedEpisode],
    topology: Topology,
    prior: FactoredCounts,
) -> FactoredCounts:
    """
    Prior counts plus the tallies of every transition in the state-annotated
    episodes. Deterministic.
    """
    prior.check_conforms(topology)
    batch = TransitionBatch.from_episodes(
        episodes, topology.num_state_features, topology.num_observation_features
    )
    return prior + tally_transitions(batch, topology)


def node_bd_score_log(prior_table: np.ndarray, stats_table: np.ndarray) -> float:
    if prior_table.shape != stats_table.shape:
        raise ModelInconsistencyError(
            f"Prior shape {prior_table.shape} != statistics shape {stats_table.shape}"
        )
    if np.any(prior_table <= 0):
        raise InvalidPriorError("BD score requires strictly positive prior counts")
    prior_totals = prior_table.sum(axis=1)
    data_totals = stats_table.sum(axis=1)
    score = np.sum(gammaln(prior_totals) - gammaln(prior_totals + data_totals))
    score += np.sum(gammaln(prior_table + stats_table) - gammaln(prior_table))
    return float(score)


def bd_score_log(
    topology: Topology,
    stats: SufficientStats,
    prior: FactoredCounts,
    nodes: Optional[Iterable[Tuple[int, int]]] = None,
) -> float:
    """
    Log Bayesian-Dirichlet marginal likelihood of the data under ``topology``.

    ``nodes`` restricts the product to the given (action, node) pairs; factors of
    nodes whose parent sets agree cancel in score ratios between topologies.
    """
    prior.check_conforms(topology)
    stats.check_conforms(topology)
    if nodes is None:
        nodes = [(a, node) for a in range(topology.num_actions) for node in range(topology.num_nodes)]
    return sum(
        node_bd_score_log(prior.table(a, node), stats.table(a, node)) for a, node in nodes
    )


def expected_transition_matrix(
    topology: Topology, counts: FactoredCounts, action: int, state_vectors: np.ndarray
) -> np.ndarray:
    """
    (|S|, |S|) matrix of expected P(s' | s, a) over all enumerated states.
    """
    matrix = np.ones((state_vectors.shape[0], state_vectors.shape[0]))
    for node in range(topology.num_state_features):
        table = counts.table(action, node)
        if table.shape[0] != topology.num_configurations(action, node):
            raise ModelInconsistencyError(f"Table (a={action}, node={node}) does not match topology")
        expected = table / table.sum(axis=1, keepdims=True)
        configs = configuration_indices(
            topology.parents[action][node], state_vectors, topology.state_arities
        )
        matrix *= expected[configs][:, state_vectors[:, node]]
    return matrix


def expected_observation_likelihoods(
    topology: Topology,
    counts: FactoredCounts,
    action: int,
    observation: FeatureVector,
    state_vectors: np.ndarray,
) -> np.ndarray:
    """
    Vector of expected P(o | s', a) for every enumerated next state s'.
    """
    likelihood = np.ones(state_vectors.shape[0])
    n = topology.num_state_features
    for j, value in enumerate(observation):
        table = counts.table(action, n + j)
        expected = table / table.sum(axis=1, keepdims=True)
        configs = configuration_indices(
            topology.parents[action][n + j], state_vectors, topology.state_arities
        )
        likelihood *= expected[configs, value]
    return likelihood


@dataclass(frozen=True)
class FactoredDynamics:
    """
    A fully specified factored model: topology plus exact CPT probabilities.

    Environments sample their true dynamics from it; it never learns.
    """

    topology: Topology
    cpts: FactoredCounts

    def __post_init__(self):
        self.cpts.check_conforms(self.topology)
        for a, nodes in enumerate(self.cpts.tables):
            for node, table in enumerate(nodes):
                if not np.allclose(table.sum(axis=1), 1.0, rtol=0.0, atol=1e-12):
                    logging.error(
                        f"[Factored Dynamics] [Init] CPT (a={a}, node={node}) rows do not sum to 1"
                    )
                    raise ModelInconsistencyError(
                        f"CPT (a={a}, node={node}) rows must sum to 1"
                    )

    def step(
        self, state: FeatureVector, action: int, rng: np.random.Generator
    ) -> Tuple[FeatureVector, FeatureVector]:
        next_state, _ = sample_next_state(self.topology, self.cpts, state, action, rng)
        observation, _ = sample_observation(self.topology, self.cpts, action, next_state, rng)
        return next_state, observation

    def likelihood(
        self,
        state: FeatureVector,
        action: int,
        next_state: FeatureVector,
        observation: FeatureVector,
    ) -> float:
        return factored_likelihood(self.topology, self.cpts, state, action, next_state, observation)
