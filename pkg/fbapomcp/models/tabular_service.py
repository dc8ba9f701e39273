"""
BA-POMDP operations over flat Dirichlet counts.
"""

from typing import Tuple

import numpy as np

from fbapomcp.common.exceptions import DegeneratePriorError
from fbapomcp.common.sampling_utils import sample_categorical
from fbapomcp.models.tabular_counts import TabularCounts


def _checked_row(counts: TabularCounts, state: int, action: int) -> np.ndarray:
    row = counts.row((state, action))
    if row.sum() <= 0:
        raise DegeneratePriorError(
            f"Row (s={state}, a={action}) has no positive mass"
        )
    return row


def expected_prob(
    counts: TabularCounts, state: int, action: int, next_state: int, observation: int
) -> float:
    counts.check_indices(state, action, next_state, observation)
    row = _checked_row(counts, state, action)
    return float(row[counts.outcome(next_state, observation)] / row.sum())


def expected_row(counts: TabularCounts, state: int, action: int) -> np.ndarray:
    """
    Expected joint distribution over (s', o) as a (states, observations) array.
    """
    row = _checked_row(counts, state, action)
    return (row / row.sum()).reshape(counts.num_states, counts.num_observations)


def update_counts(
    counts: TabularCounts, state: int, action: int, next_state: int, observation: int
) -> TabularCounts:
    counts.check_indices(state, action, next_state, observation)
    return counts.incremented([((state, action), counts.outcome(next_state, observation))])


def ba_pomcp_step(
    state: int, counts: TabularCounts, action: int, rng: np.random.Generator
) -> Tuple[int, TabularCounts, int]:
    row = _checked_row(counts, state, action)
    outcome = sample_categorical(row, rng)
    next_state, observation = counts.split_outcome(outcome)
    return next_state, counts.incremented([((state, action), outcome)]), observation
