"""
Per-action Bayes-net topologies of the factored dynamics.

Output nodes are numbered ``0..n-1`` for the next-state features and
``n..n+m-1`` for the observation features. A state node's parents index the
current-state features; an observation node's parents index the next-state
features. Input nodes therefore only have outgoing edges, observation nodes
only incoming ones, and there are no edges among next-state nodes.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.pomdp.space import FactoredSpace


ParentSet = Tuple[int, ...]
NodeParents = Tuple[ParentSet, ...]
Edge = Tuple[int, int, int]
"""(action, node, parent)"""


@dataclass(frozen=True)
class Topology:
    state_arities: Tuple[int, ...]
    observation_arities: Tuple[int, ...]
    parents: Tuple[NodeParents, ...]

    def __post_init__(self):
        n, m = len(self.state_arities), len(self.observation_arities)
        for a, node_parents in enumerate(self.parents):
            if len(node_parents) != n + m:
                raise InvalidArgumentError(
                    f"Action {a} lists {len(node_parents)} nodes, expected {n + m}"
                )
            for node, parent_set in enumerate(node_parents):
                if list(parent_set) != sorted(set(parent_set)):
                    raise InvalidArgumentError(
                        f"Parents of node {node} (action {a}) must be sorted and unique: {parent_set}"
                    )
                if any(not 0 <= p < n for p in parent_set):
                    raise InvalidArgumentError(
                        f"Parent out of range for node {node} (action {a}): {parent_set}"
                    )

    @classmethod
    def from_lists(
        cls,
        state_space: FactoredSpace,
        observation_space: FactoredSpace,
        parents: Sequence[Sequence[Iterable[int]]],
    ) -> "Topology":
        return cls(
            state_space.arities,
            observation_space.arities,
            tuple(tuple(tuple(sorted(set(p))) for p in nodes) for nodes in parents),
        )

    @property
    def num_actions(self) -> int:
        return len(self.parents)

    @property
    def num_state_features(self) -> int:
        return len(self.state_arities)

    @property
    def num_observation_features(self) -> int:
        return len(self.observation_arities)

    @property
    def num_nodes(self) -> int:
        return len(self.state_arities) + len(self.observation_arities)

    def is_observation_node(self, node: int) -> bool:
        return node >= len(self.state_arities)

    def node_arity(self, node: int) -> int:
        n = len(self.state_arities)
        return self.state_arities[node] if node < n else self.observation_arities[node - n]

    def node_parents(self, action: int, node: int) -> ParentSet:
        return self.parents[action][node]

    def num_configurations(self, action: int, node: int) -> int:
        return configurations_of(self.parents[action][node], self.state_arities)

    def with_parents(self, action: int, node: int, parent_set: Iterable[int]) -> "Topology":
        rows = [list(nodes) for nodes in self.parents]
        rows[action][node] = tuple(sorted(set(parent_set)))
        return Topology(
            self.state_arities,
            self.observation_arities,
            tuple(tuple(nodes) for nodes in rows),
        )

    def flipped(self, edge: Edge) -> "Topology":
        action, node, parent = edge
        return self.with_parents(action, node, set(self.parents[action][node]) ^ {parent})

    def flipped_group(self, group: Sequence[Edge]) -> "Topology":
        """
        Set every edge of ``group`` to the opposite of the first edge's presence.
        """
        action, node, parent = group[0]
        add = parent not in self.parents[action][node]
        topology = self
        for a, n, p in group:
            parents = set(topology.parents[a][n])
            topology = topology.with_parents(a, n, parents | {p} if add else parents - {p})
        return topology

    def differing_nodes(self, other: "Topology") -> List[Tuple[int, int]]:
        return [
            (a, node)
            for a in range(self.num_actions)
            for node in range(self.num_nodes)
            if self.parents[a][node] != other.parents[a][node]
        ]

    def to_text(
        self,
        state_space: FactoredSpace,
        observation_space: FactoredSpace,
        action_names: Optional[Sequence[str]] = None,
    ) -> str:
        """
        One ``action:node<-parent,parent`` line per node.

        Next-state nodes carry a trailing ``'``; observation nodes use the
        observation feature names.
        """
        names = state_space.names
        n = self.num_state_features
        lines = []
        for a, node_parents in enumerate(self.parents):
            label = action_names[a] if action_names else str(a)
            for node, parent_set in enumerate(node_parents):
                if node >= n:
                    node_name = observation_space.names[node - n]
                    parent_names = [f"{names[p]}'" for p in parent_set]
                else:
                    node_name = f"{names[node]}'"
                    parent_names = [names[p] for p in parent_set]
                lines.append(f"{label}:{node_name}<-{','.join(parent_names)}")
        return "\n".join(lines)

    @classmethod
    def from_text(
        cls,
        text: str,
        state_space: FactoredSpace,
        observation_space: FactoredSpace,
        action_names: Optional[Sequence[str]] = None,
    ) -> "Topology":
        n, m = state_space.num_features, observation_space.num_features
        labels = list(action_names) if action_names else None
        rows: List[List[ParentSet]] = []
        for line in text.strip().splitlines():
            head, _, tail = line.strip().partition("<-")
            label, _, node_name = head.partition(":")
            action = labels.index(label) if labels else int(label)
            while len(rows) <= action:
                rows.append([()] * (n + m))
            if node_name.endswith("'"):
                node = state_space.feature_index(node_name[:-1])
            else:
                node = n + observation_space.feature_index(node_name)
            parent_set = [
                state_space.feature_index(name.rstrip("'"))
                for name in filter(None, tail.split(","))
            ]
            rows[action][node] = tuple(sorted(parent_set))
        return cls(state_space.arities, observation_space.arities, tuple(tuple(r) for r in rows))


def configurations_of(parent_set: ParentSet, state_arities: Sequence[int]) -> int:
    total = 1
    for parent in parent_set:
        total *= state_arities[parent]
    return total


@dataclass(frozen=True)
class EdgeConstraints:
    """
    Which edges a structure prior keeps fixed and which it may flip.

    ``required`` holds the edges present in every topology; ``mutable`` lists,
    per action and node, the parents whose edge is uncertain. Each entry of
    ``groups`` names mutable edges that are present or absent together.
    """

    required: Topology
    mutable: Tuple[NodeParents, ...]
    groups: Tuple[Tuple[Edge, ...], ...] = ()

    def __post_init__(self):
        edges = set(self.mutable_edges())
        grouped = [edge for group in self.groups for edge in group]
        if any(not group for group in self.groups):
            raise InvalidArgumentError("Edge groups must not be empty")
        if len(grouped) != len(set(grouped)):
            raise InvalidArgumentError("An edge may belong to at most one group")
        if not set(grouped) <= edges:
            raise InvalidArgumentError(
                f"Grouped edges must be mutable: {sorted(set(grouped) - edges)}"
            )

    @classmethod
    def frozen(cls, topology: Topology) -> "EdgeConstraints":
        empty = tuple(tuple(() for _ in nodes) for nodes in topology.parents)
        return cls(required=topology, mutable=empty)

    def mutable_edges(self) -> List[Edge]:
        return [
            (a, node, parent)
            for a, nodes in enumerate(self.mutable)
            for node, parent_set in enumerate(nodes)
            for parent in parent_set
        ]

    def flip_units(self) -> List[Tuple[Edge, ...]]:
        """
        The structure choices: each group, then every ungrouped mutable edge alone.
        """
        grouped = {edge for group in self.groups for edge in group}
        singles = [(edge,) for edge in self.mutable_edges() if edge not in grouped]
        return [tuple(group) for group in self.groups] + singles

    def admits(self, topology: Topology) -> bool:
        for a, nodes in enumerate(topology.parents):
            for node, parent_set in enumerate(nodes):
                required = set(self.required.parents[a][node])
                allowed = required | set(self.mutable[a][node])
                if not required <= set(parent_set) <= allowed:
                    return False
        for group in self.groups:
            if len({parent in topology.parents[a][node] for a, node, parent in group}) > 1:
                return False
        return True


def enumerate_neighbor_topologies(
    topology: Topology, constraints: EdgeConstraints
) -> Set[Topology]:
    """
    All topologies one flip away from ``topology``, a grouped edge set counting as one flip.
    """
    return {topology.flipped_group(unit) for unit in constraints.flip_units()}


def sample_topology(
    constraints: EdgeConstraints,
    rng: np.random.Generator,
    edge_probability: float = 0.5,
) -> Topology:
    """
    Required edges plus each edge group, and each ungrouped mutable edge,
    independently with ``edge_probability``.
    """
    topology = constraints.required
    for unit in constraints.flip_units():
        if rng.random() < edge_probability:
            topology = topology.flipped_group(unit)
    return topology
