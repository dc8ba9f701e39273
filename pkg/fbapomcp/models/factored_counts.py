from typing import Dict, Hashable, Optional, Sequence, Tuple

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError, ModelInconsistencyError
from fbapomcp.models.count_overlay import RowOverlayCounts
from fbapomcp.models.topology import ParentSet, Topology


NodeKey = Tuple[int, int, int]
"""(action, node, parent configuration)"""


def configuration_index(
    parent_set: ParentSet, values: Sequence[int], state_arities: Sequence[int]
) -> int:
    """
    Mixed-radix index of the parents' values, first parent fastest.
    """
    index, stride = 0, 1
    for parent in parent_set:
        index += values[parent] * stride
        stride *= state_arities[parent]
    return index


def configuration_indices(
    parent_set: ParentSet, values: np.ndarray, state_arities: Sequence[int]
) -> np.ndarray:
    """
    Vectorized ``configuration_index`` over the rows of an (N, n) value array.
    """
    index = np.zeros(values.shape[0], dtype=np.int64)
    stride = 1
    for parent in parent_set:
        index += values[:, parent] * stride
        stride *= state_arities[parent]
    return index


def configuration_values(parent_set: ParentSet, state_arities: Sequence[int]) -> np.ndarray:
    """
    (configurations, len(parent_set)) array; row e holds the parent values of configuration e.
    """
    arities = [state_arities[p] for p in parent_set]
    if not arities:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices(arities[::-1]).reshape(len(arities), -1)
    return grids[::-1].T.copy()


class FactoredCounts(RowOverlayCounts):
    """
    Dirichlet counts over the CPTs of a topology.

    ``tables[a][node]`` has shape (parent configurations, node arity).
    """

    def __init__(
        self,
        tables: Sequence[Sequence[np.ndarray]],
        rows: Optional[Dict[Hashable, np.ndarray]] = None,
    ):
        super().__init__(rows)
        self.tables: Tuple[Tuple[np.ndarray, ...], ...] = tuple(
            tuple(np.asarray(t, dtype=float) for t in nodes) for nodes in tables
        )
        for nodes in self.tables:
            for t in nodes:
                if t.ndim != 2:
                    raise InvalidArgumentError(
                        f"CPT counts must be 2-D (configurations, values), got shape {t.shape}"
                    )
                if np.any(t < 0):
                    raise InvalidArgumentError("Counts must be nonnegative")

    def _base_row(self, key: NodeKey) -> np.ndarray:
        action, node, config = key
        return self.tables[action][node][config]

    def table(self, action: int, node: int) -> np.ndarray:
        """
        The node's full table with every overridden row applied.
        """
        base = self.tables[action][node]
        overrides = [
            (config, counts)
            for (a, n, config), counts in self._rows.items()
            if a == action and n == node
        ]
        if not overrides:
            return base
        merged = base.copy()
        for config, counts in overrides:
            merged[config] = counts
        return merged

    def check_conforms(self, topology: Topology):
        if len(self.tables) != topology.num_actions:
            raise ModelInconsistencyError(
                f"Counts cover {len(self.tables)} actions, topology has {topology.num_actions}"
            )
        for a, nodes in enumerate(self.tables):
            if len(nodes) != topology.num_nodes:
                raise ModelInconsistencyError(
                    f"Counts for action {a} cover {len(nodes)} nodes, topology has {topology.num_nodes}"
                )
            for node, table in enumerate(nodes):
                expected = (topology.num_configurations(a, node), topology.node_arity(node))
                if table.shape != expected:
                    raise ModelInconsistencyError(
                        f"Table (a={a}, node={node}) has shape {table.shape}, topology requires {expected}"
                    )

    def __add__(self, other: "FactoredCounts") -> "FactoredCounts":
        if len(self.tables) != len(other.tables):
            raise InvalidArgumentError("Cannot add counts over different action sets")
        return FactoredCounts(
            [
                [self.table(a, node) + other.table(a, node) for node in range(len(nodes))]
                for a, nodes in enumerate(self.tables)
            ]
        )

    def allclose(self, other: "FactoredCounts", atol: float = 1e-12) -> bool:
        return all(
            self.table(a, node).shape == other.table(a, node).shape
            and np.allclose(self.table(a, node), other.table(a, node), rtol=0.0, atol=atol)
            for a, nodes in enumerate(self.tables)
            for node in range(len(nodes))
        )


SufficientStats = FactoredCounts
"""Integer-valued tallies laid out like the counts of one topology."""
