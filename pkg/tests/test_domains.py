import itertools

import numpy as np
import pytest

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.domains import DomainFactory
from fbapomcp.domains.collision_avoidance import collision_reward, collision_terminal
from fbapomcp.domains.domain_model import (
    CollisionActionEnum,
    DomainEnum,
    GridActionEnum,
    TigerActionEnum,
)
from fbapomcp.domains.domain_utils import drift_row, localizer_row, move_row
from fbapomcp.domains.gridworld import GoalReached, make_gridworld
from fbapomcp.domains.tiger import tiger_reward, tiger_terminal
from fbapomcp.models.factored_service import expected_observation_likelihoods, fba_pomcp_step
from fbapomcp.pomdp.episode_service import run_episode


class FixedPolicy:
    def __init__(self, choose):
        self.choose = choose
        self.steps = 0

    def begin_episode(self):
        self.steps = 0

    def act(self, steps_left):
        self.steps += 1
        return self.choose()

    def observe(self, action, observation):
        return None

    def end_episode(self):
        pass


@pytest.mark.parametrize("name", list(DomainEnum))
def test_prior_admits_the_true_structure(name):
    domain, prior = DomainFactory.create(name)
    assert prior.constraints.admits(domain.dynamics.topology)
    assert prior.constraints.admits(prior.reference_topology)
    assert np.isclose(domain.initial_state_probs.sum(), 1.0)
    prior.prior_counts(prior.reference_topology).check_conforms(prior.reference_topology)


def test_factory_rejects_unknown_domain():
    with pytest.raises(InvalidArgumentError):
        DomainFactory.create("rocksample")


def test_tiger_rewards():
    left, right = (0, 0), (1, 0)
    assert tiger_reward(left, TigerActionEnum.OPEN_LEFT, left) == -100.0
    assert tiger_reward(left, TigerActionEnum.OPEN_RIGHT, left) == 10.0
    assert tiger_reward(right, TigerActionEnum.OPEN_RIGHT, right) == -100.0
    assert tiger_reward(right, TigerActionEnum.LISTEN, right) == -1.0
    assert tiger_terminal(left, TigerActionEnum.OPEN_RIGHT, left)
    assert not tiger_terminal(left, TigerActionEnum.LISTEN, left)


def test_factored_tiger_shape(tiger):
    domain, prior = tiger
    assert domain.state_space.size == 256
    assert domain.observation_space.size == 2
    listen_node = domain.state_space.num_features
    assert len(prior.constraints.mutable[TigerActionEnum.LISTEN][listen_node]) == 8
    assert domain.dynamics.likelihood((0,) * 8, TigerActionEnum.LISTEN, (0,) * 8, (0,)) == pytest.approx(0.85)


def test_random_door_policy_value(tiger, rng):
    domain, _ = tiger
    agent = FixedPolicy(lambda: int(rng.integers(2)))
    returns = [run_episode(domain, agent, domain.horizon, rng)[0] for _ in range(10_000)]
    assert np.mean(returns) == pytest.approx(-45.0, abs=3.0)


def test_collision_episode_lasts_one_crossing(rng):
    domain, _ = DomainFactory.create("collision", width=5, height=5)
    agent = FixedPolicy(lambda: CollisionActionEnum.STAY)
    _, history = run_episode(domain, agent, domain.horizon, rng)
    assert len(history) == 4


def test_collision_rewards():
    assert collision_reward((1, 2, 2), CollisionActionEnum.STAY, (0, 2, 2)) == -1000.0
    assert collision_reward((1, 2, 2), CollisionActionEnum.UP, (0, 3, 2)) == -1.0
    assert collision_reward((3, 2, 2), CollisionActionEnum.DOWN, (2, 1, 2)) == -1.0
    assert collision_terminal((1, 2, 2), CollisionActionEnum.STAY, (0, 2, 2))
    assert not collision_terminal((3, 2, 2), CollisionActionEnum.STAY, (2, 2, 2))


@pytest.mark.parametrize("width,height", [(1, 5), (5, 4), (5, 1)])
def test_collision_rejects_bad_grid(width, height):
    with pytest.raises(InvalidArgumentError):
        DomainFactory.create("collision", width=width, height=height)


def test_gridworld_goal_is_terminal_and_pays():
    goal = GoalReached([(4, 0), (0, 4)])
    assert goal((3, 0, 0), GridActionEnum.RIGHT, (4, 0, 0))
    assert goal.reward((3, 0, 0), GridActionEnum.RIGHT, (4, 0, 0)) == 1.0
    assert not goal((3, 0, 1), GridActionEnum.RIGHT, (4, 0, 1))


def test_gridworld_traps_slow_movement():
    domain, _ = make_gridworld(size=5, traps=[(0, 0)])
    trapped = domain.dynamics.likelihood
    observation = (1, 0, 0)
    from_trap = sum(
        trapped((0, 0, 0), GridActionEnum.RIGHT, (1, 0, 0), (ox, oy, 0))
        for ox in range(5)
        for oy in range(5)
    )
    from_open = sum(
        trapped((1, 0, 0), GridActionEnum.RIGHT, (2, 0, 0), (ox, oy, 0))
        for ox in range(5)
        for oy in range(5)
    )
    assert from_trap == pytest.approx(0.15)
    assert from_open == pytest.approx(0.95)
    assert trapped((1, 0, 0), GridActionEnum.UP, (1, 1, 0), observation) == pytest.approx(0.95 * 0.9 * 0.05)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"size": 1},
        {"goal_candidates": [(0, 0), (4, 4)]},
        {"goal_candidates": [(4, 4)]},
        {"goal_candidates": [(4, 4), (5, 0)]},
        {"traps": [(7, 7)]},
    ],
)
def test_gridworld_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        make_gridworld(**kwargs)


def test_row_helpers():
    assert np.allclose(move_row(0, -1, 3, 0.9), [1, 0, 0])
    assert np.allclose(move_row(1, 1, 3, 0.9), [0, 0.1, 0.9])
    assert np.allclose(drift_row(0, 3, 0.5, 0.25, 0.25), [0.75, 0.25, 0])
    assert np.allclose(localizer_row(0, 3, 0.8), [0.8, 0.2, 0])
    assert np.allclose(localizer_row(1, 3, 0.8), [0.1, 0.8, 0.1])


def test_gridworld_prior_shares_goal_edges_across_actions(rng):
    _, prior = make_gridworld()
    goal = 2
    draws = 4000
    aware = 0
    for _ in range(draws):
        topology = prior.sample_topology(rng)
        flags = {
            goal in topology.parents[a][node] for a in range(len(GridActionEnum)) for node in (0, 1)
        }
        assert len(flags) == 1
        aware += flags.pop()
    assert aware / draws == pytest.approx(0.5, abs=4 * np.sqrt(0.25 / draws))


def test_tiger_dynamics_ignore_dummy_features(tiger):
    domain, _ = tiger
    reference = {}
    for dummies in itertools.product(range(2), repeat=7):
        for action in TigerActionEnum:
            for side in range(2):
                state = (side, *dummies)
                for heard in range(2):
                    p = domain.dynamics.likelihood(state, action, state, (heard,))
                    key = (action, side, heard)
                    assert p == pytest.approx(reference.setdefault(key, p), abs=1e-12)
    assert reference[(TigerActionEnum.LISTEN, 0, 0)] == pytest.approx(0.85)
    assert reference[(TigerActionEnum.OPEN_LEFT, 0, 0)] == pytest.approx(0.5)


def test_true_model_hears_correctly_at_stated_rate(small_tiger, rng):
    domain, _ = small_tiger
    topology, cpts = domain.dynamics.topology, domain.dynamics.cpts
    draws = 100_000
    correct = sum(
        fba_pomcp_step((0, 0), topology, cpts, TigerActionEnum.LISTEN, rng)[2] == (0,)
        for _ in range(draws)
    )
    assert correct / draws == pytest.approx(0.85, abs=4 * np.sqrt(0.85 * 0.15 / draws))


def test_listening_twice_agrees_with_the_tiger(small_tiger):
    domain, _ = small_tiger
    listen, states = TigerActionEnum.LISTEN, list(domain.state_space)
    start = (0, 1)
    both = sum(
        domain.dynamics.likelihood(start, listen, first, (0,))
        * domain.dynamics.likelihood(first, listen, second, (0,))
        for first in states
        for second in states
    )
    assert both == pytest.approx(0.7225)


def test_tiger_prior_expects_sixty_percent_accuracy(tiger):
    domain, prior = tiger
    topology = prior.reference_topology
    vectors = domain.state_space.all_vectors()
    hear_left = expected_observation_likelihoods(
        topology, prior.prior_counts(topology), TigerActionEnum.LISTEN, (0,), vectors
    )
    assert np.allclose(hear_left[vectors[:, 0] == 0], 0.60, atol=1e-12)
    assert np.allclose(hear_left[vectors[:, 0] == 1], 0.40, atol=1e-12)


def test_collision_obstacle_clamps_at_top_edge():
    domain, _ = DomainFactory.create("collision", width=5, height=5)
    top = 4
    stays = sum(
        domain.dynamics.likelihood((3, 2, top), CollisionActionEnum.STAY, (2, 2, top), (o,))
        for o in range(5)
    )
    falls = sum(
        domain.dynamics.likelihood((3, 2, top), CollisionActionEnum.STAY, (2, 2, top - 1), (o,))
        for o in range(5)
    )
    assert stays == pytest.approx(0.75)
    assert falls == pytest.approx(0.25)
