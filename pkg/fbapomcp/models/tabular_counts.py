from typing import Dict, Hashable, Optional, Tuple

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.models.count_overlay import RowOverlayCounts


MAX_ROW_ENTRIES = 1_000_000


class TabularCounts(RowOverlayCounts):
    """
    Flat BA-POMDP counts: one dense row per (state, action) over the joint
    (next state, observation) outcomes. Outcome ``j = s' * num_observations + o``.
    """

    def __init__(
        self,
        table: np.ndarray,
        num_observations: int,
        rows: Optional[Dict[Hashable, np.ndarray]] = None,
    ):
        if table.ndim != 3:
            raise InvalidArgumentError(
                f"Count table must be (states, actions, outcomes), got shape {table.shape}"
            )
        num_states = table.shape[0]
        if table.shape[2] != num_states * num_observations:
            raise InvalidArgumentError(
                f"Row length {table.shape[2]} != |S|*|O| = {num_states * num_observations}"
            )
        if table.shape[2] > MAX_ROW_ENTRIES:
            raise InvalidArgumentError(
                f"Flat rows of {table.shape[2]} entries exceed the {MAX_ROW_ENTRIES} limit; use the factored model"
            )
        if np.any(table < 0):
            raise InvalidArgumentError("Counts must be nonnegative")
        super().__init__(rows)
        self.table = table
        self.num_observations = num_observations

    @property
    def num_states(self) -> int:
        return self.table.shape[0]

    @property
    def num_actions(self) -> int:
        return self.table.shape[1]

    def _base_row(self, key: Tuple[int, int]) -> np.ndarray:
        state, action = key
        return self.table[state, action]

    def outcome(self, next_state: int, observation: int) -> int:
        return next_state * self.num_observations + observation

    def split_outcome(self, outcome: int) -> Tuple[int, int]:
        return divmod(outcome, self.num_observations)

    def check_indices(self, state: int, action: int, next_state: int, observation: int):
        if not (
            0 <= state < self.num_states
            and 0 <= action < self.num_actions
            and 0 <= next_state < self.num_states
            and 0 <= observation < self.num_observations
        ):
            raise InvalidArgumentError(
                f"Index out of range: s={state}, a={action}, s'={next_state}, o={observation}"
            )

    def total_mass(self) -> float:
        mass = float(self.table.sum())
        for (state, action), counts in self._rows.items():
            mass += float(counts.sum() - self.table[state, action].sum())
        return mass
