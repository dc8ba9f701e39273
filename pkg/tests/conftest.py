import numpy as np
import pytest

from fbapomcp.domains import DomainFactory
from fbapomcp.domains.domain_utils import build_dynamics, build_node_priors, one_hot
from fbapomcp.models.factored_counts import FactoredCounts
from fbapomcp.models.prior_base import PriorSpec
from fbapomcp.models.topology import EdgeConstraints, Topology
from fbapomcp.pomdp.domain_base import DomainSpec
from fbapomcp.pomdp.space import FactoredSpace


STAY = 0.7
ACCURACY = 0.8


def zero_reward(state, action, next_state) -> float:
    return 0.0


def never_terminal(state, action, next_state) -> bool:
    return False


def hmm_row(stay: float, accuracy: float):
    def row(action, node, values):
        if node == 0:
            value = values[0]
            return stay * one_hot(value, 2) + (1 - stay) * one_hot(1 - value, 2)
        return accuracy * one_hot(values[0], 2) + (1 - accuracy) * one_hot(1 - values[0], 2)

    return row


def make_hmm_toy(stay: float = STAY, accuracy: float = ACCURACY, confidence: float = 5.0):
    """
    Two hidden states that persist with ``stay``, read by a sensor with
    ``accuracy``; one action, nothing uncertain about the structure.
    """
    state_space = FactoredSpace.from_arities([("s", 2)])
    observation_space = FactoredSpace.from_arities([("o", 2)])
    topology = Topology.from_lists(state_space, observation_space, [[(0,), (0,)]])
    row = hmm_row(stay, accuracy)
    initial = np.array([0.5, 0.5])
    domain = DomainSpec(
        name="hmm",
        state_space=state_space,
        observation_space=observation_space,
        action_count=1,
        reward=zero_reward,
        terminal=never_terminal,
        dynamics=build_dynamics(topology, row),
        initial_state_probs=initial,
    )
    prior = PriorSpec(
        state_space=state_space,
        observation_space=observation_space,
        initial_state_probs=initial,
        constraints=EdgeConstraints.frozen(topology),
        reference_topology=topology,
        node_priors=build_node_priors(topology, row, lambda a, node: confidence),
    )
    return domain, prior


def exact_filter(
    initial: np.ndarray, transition: np.ndarray, emission: np.ndarray, observations
) -> np.ndarray:
    belief = initial.copy()
    for o in observations:
        belief = emission[:, o] * (transition.T @ belief)
        belief /= belief.sum()
    return belief


def two_feature_spaces():
    return (
        FactoredSpace.from_arities([("x", 2), ("y", 2)]),
        FactoredSpace.from_arities([("z", 2)]),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def hmm_toy():
    return make_hmm_toy()


@pytest.fixture
def spaces():
    return two_feature_spaces()


@pytest.fixture
def dense_topology(spaces):
    """
    Two binary state features and one binary observation, two actions, every
    admissible edge present.
    """
    state_space, observation_space = spaces
    nodes = [(0, 1), (0, 1), (0, 1)]
    return Topology.from_lists(state_space, observation_space, [nodes, nodes])


@pytest.fixture
def random_counts(dense_topology, rng):
    return FactoredCounts(
        [
            [
                rng.uniform(0.5, 5.0, size=(dense_topology.num_configurations(a, node), 2))
                for node in range(dense_topology.num_nodes)
            ]
            for a in range(dense_topology.num_actions)
        ]
    )


@pytest.fixture
def small_tiger():
    return DomainFactory.create("tiger", n_dummy=1)


@pytest.fixture
def tiger():
    return DomainFactory.create("tiger", n_dummy=7)
