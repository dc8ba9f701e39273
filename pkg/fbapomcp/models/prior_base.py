"""
Prior beliefs over hyper-states: b0 over states, a structure prior over
topologies and a generator of Dirichlet prior counts for any topology.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.common.sampling_utils import sample_categorical
from fbapomcp.models import factored_service
from fbapomcp.models.factored_counts import FactoredCounts, configuration_values
from fbapomcp.models.hyper_model import HyperParticle, factored_particle
from fbapomcp.models.tabular_counts import TabularCounts
from fbapomcp.models.topology import EdgeConstraints, ParentSet, Topology, sample_topology
from fbapomcp.pomdp.space import FactoredSpace


@dataclass(frozen=True)
class NodePrior:
    """
    A node's prior CPT, stated for a reference parent set, with a confidence
    mass (the Dirichlet total per configuration).
    """

    parents: ParentSet
    probabilities: np.ndarray
    confidence: float

    def __post_init__(self):
        if self.probabilities.ndim != 2:
            raise InvalidArgumentError("Node prior probabilities must be (configurations, values)")
        if not np.allclose(self.probabilities.sum(axis=1), 1.0):
            raise InvalidArgumentError("Node prior rows must sum to 1")
        if self.confidence <= 0:
            raise InvalidArgumentError("Confidence mass must be positive")

    def project(self, parent_set: ParentSet, state_arities: Tuple[int, ...]) -> np.ndarray:
        """
        Conditional probabilities given ``parent_set``: parents outside it are
        averaged out uniformly, extra parents leave the rows unchanged.
        """
        reference = configuration_values(self.parents, state_arities)
        target = configuration_values(parent_set, state_arities)
        shared = [p for p in parent_set if p in self.parents]
        projected = np.empty((target.shape[0], self.probabilities.shape[1]))
        for e, values in enumerate(target):
            mask = np.ones(reference.shape[0], dtype=bool)
            for parent in shared:
                mask &= reference[:, self.parents.index(parent)] == values[parent_set.index(parent)]
            projected[e] = self.probabilities[mask].mean(axis=0)
        return projected


@dataclass(frozen=True)
class PriorSpec:
    state_space: FactoredSpace
    observation_space: FactoredSpace
    initial_state_probs: np.ndarray
    constraints: EdgeConstraints
    reference_topology: Topology
    node_priors: Tuple[Tuple[NodePrior, ...], ...]
    flat_confidence: float = 10.0
    floor: float = 0.01
    floored_nodes: Optional[FrozenSet[Tuple[int, int]]] = None
    _cache: Dict[Topology, FactoredCounts] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if len(self.node_priors) != self.reference_topology.num_actions:
            raise InvalidArgumentError("One row of node priors per action is required")
        for a, nodes in enumerate(self.node_priors):
            if len(nodes) != self.reference_topology.num_nodes:
                raise InvalidArgumentError(f"Action {a} needs one prior per output node")
        if self.floored_nodes is None:
            # nodes whose parent set can change get strictly positive priors for BD scoring
            floored = frozenset(
                (a, node)
                for a, nodes in enumerate(self.constraints.mutable)
                for node, parents in enumerate(nodes)
                if parents
            )
            object.__setattr__(self, "floored_nodes", floored)

    @property
    def num_actions(self) -> int:
        return self.reference_topology.num_actions

    def node_prior(self, action: int, node: int, parent_set: ParentSet) -> np.ndarray:
        prior = self.node_priors[action][node]
        counts = prior.confidence * prior.project(
            tuple(parent_set), self.reference_topology.state_arities
        )
        if (action, node) in self.floored_nodes:
            counts = np.maximum(counts, self.floor)
        return counts

    def prior_counts(self, topology: Topology) -> FactoredCounts:
        cached = self._cache.get(topology)
        if cached is None:
            cached = FactoredCounts(
                [
                    [
                        self.node_prior(a, node, topology.parents[a][node])
                        for node in range(topology.num_nodes)
                    ]
                    for a in range(topology.num_actions)
                ]
            )
            self._cache[topology] = cached
        return cached

    def sample_topology(self, rng: np.random.Generator) -> Topology:
        return sample_topology(self.constraints, rng)

    def sample_state(self, rng: np.random.Generator):
        return self.state_space.vector(sample_categorical(self.initial_state_probs, rng))

    def sample_particle(self, rng: np.random.Generator) -> HyperParticle:
        topology = self.sample_topology(rng)
        return factored_particle(self.sample_state(rng), topology, self.prior_counts(topology))

    def known_structure(self) -> "PriorSpec":
        """
        The same count prior with all structure mass on the reference topology.
        """
        return replace(self, constraints=EdgeConstraints.frozen(self.reference_topology))

    def tabular_prior(self) -> TabularCounts:
        """
        Flat counts M * P(s', o | s, a) of the expected reference-structure prior.
        """
        topology = self.reference_topology
        counts = self.prior_counts(topology)
        vectors = self.state_space.all_vectors()
        observations = list(self.observation_space)
        num_states, num_observations = self.state_space.size, len(observations)
        table = np.empty((num_states, self.num_actions, num_states * num_observations))
        for a in range(self.num_actions):
            transition = factored_service.expected_transition_matrix(topology, counts, a, vectors)
            likelihoods = np.stack(
                [
                    factored_service.expected_observation_likelihoods(
                        topology, counts, a, observation, vectors
                    )
                    for observation in observations
                ],
                axis=1,
            )
            joint = transition[:, :, None] * likelihoods[None, :, :]
            table[:, a, :] = self.flat_confidence * joint.reshape(num_states, -1)
        return TabularCounts(table, num_observations)
