import numpy as np
import pytest

from fbapomcp.common.exceptions import DegeneratePriorError, InvalidArgumentError
from fbapomcp.models import tabular_service
from fbapomcp.models.tabular_counts import TabularCounts


def make_counts(rng, num_states=3, num_actions=2, num_observations=2):
    table = rng.integers(0, 6, size=(num_states, num_actions, num_states * num_observations))
    table = table.astype(float) + 0.5
    return TabularCounts(table, num_observations)


def test_expected_prob_is_normalized_count(rng):
    counts = make_counts(rng)
    row = counts.table[1, 0]
    for next_state in range(3):
        for observation in range(2):
            expected = row[next_state * 2 + observation] / row.sum()
            assert tabular_service.expected_prob(counts, 1, 0, next_state, observation) == pytest.approx(expected)


def test_expected_row_sums_to_one(rng):
    counts = make_counts(rng)
    joint = tabular_service.expected_row(counts, 2, 1)
    assert joint.shape == (3, 2)
    assert joint.sum() == pytest.approx(1.0)


def test_update_counts_adds_one_to_a_copy(rng):
    counts = make_counts(rng)
    before = counts.table.copy()
    updated = tabular_service.update_counts(counts, 0, 1, 2, 1)
    assert updated.row((0, 1))[5] == before[0, 1, 5] + 1
    assert np.array_equal(counts.row((0, 1)), before[0, 1])
    assert np.array_equal(counts.table, before)
    assert updated.total_mass() == pytest.approx(counts.total_mass() + 1)


def test_scratch_counts_are_mutated_in_place(rng):
    counts = make_counts(rng)
    scratch = counts.scratch()
    again = tabular_service.update_counts(scratch, 0, 0, 0, 0)
    assert again is scratch
    assert scratch.row((0, 0))[0] == counts.row((0, 0))[0] + 1


def test_update_counts_rejects_bad_indices(rng):
    counts = make_counts(rng)
    with pytest.raises(InvalidArgumentError):
        tabular_service.update_counts(counts, 3, 0, 0, 0)
    with pytest.raises(InvalidArgumentError):
        tabular_service.expected_prob(counts, 0, 0, 0, 2)


def test_zero_row_is_degenerate(rng):
    counts = make_counts(rng)
    counts.table[0, 0] = 0.0
    with pytest.raises(DegeneratePriorError):
        tabular_service.expected_prob(counts, 0, 0, 0, 0)
    with pytest.raises(DegeneratePriorError):
        tabular_service.ba_pomcp_step(0, counts, 0, rng)


def test_table_shape_is_checked():
    with pytest.raises(InvalidArgumentError):
        TabularCounts(np.ones((3, 2, 5)), 2)
    with pytest.raises(InvalidArgumentError):
        TabularCounts(-np.ones((2, 1, 4)), 2)


def test_step_increments_sampled_outcome(rng):
    counts = make_counts(rng)
    next_state, updated, observation = tabular_service.ba_pomcp_step(1, counts, 1, rng)
    outcome = counts.outcome(next_state, observation)
    assert updated.row((1, 1))[outcome] == counts.row((1, 1))[outcome] + 1
    assert updated.total_mass() == pytest.approx(counts.total_mass() + 1)


def test_step_frequencies_match_expected_prob(rng):
    counts = make_counts(rng)
    draws = 100_000
    frequencies = np.zeros(6)
    for _ in range(draws):
        next_state, _, observation = tabular_service.ba_pomcp_step(2, counts, 0, rng)
        frequencies[counts.outcome(next_state, observation)] += 1
    for next_state in range(3):
        for observation in range(2):
            p = tabular_service.expected_prob(counts, 2, 0, next_state, observation)
            sigma = np.sqrt(draws * p * (1 - p))
            assert abs(frequencies[next_state * 2 + observation] - draws * p) <= 4 * sigma + 1
