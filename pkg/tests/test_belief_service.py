import math

import numpy as np
import pytest

from fbapomcp.belief import belief_service
from fbapomcp.belief.belief_model import ResamplingEnum
from fbapomcp.belief.particle_belief import ParticleBelief
from fbapomcp.common.exceptions import (
    BeliefCollapseError,
    EmptyBeliefError,
    InvalidArgumentError,
    RejectionTimeoutError,
)
from fbapomcp.domains.domain_utils import build_dynamics, one_hot, uniform
from fbapomcp.models.hyper_model import HyperParticle, KnownModel
from fbapomcp.models.topology import Topology
from fbapomcp.pomdp.space import FactoredSpace
from tests.conftest import ACCURACY, STAY, exact_filter, make_hmm_toy


OBSERVATIONS = [0, 0, 1, 0, 1, 1, 1, 0, 1, 1]
TRANSITION = np.array([[STAY, 1 - STAY], [1 - STAY, STAY]])
EMISSION = np.array([[ACCURACY, 1 - ACCURACY], [1 - ACCURACY, ACCURACY]])


def known_model(domain):
    return KnownModel(domain.state_space, domain.observation_space, domain.dynamics)


def prior_belief(model, rng, size):
    return ParticleBelief.uniform([model.particle((int(rng.integers(2)),)) for _ in range(size)])


def frequencies(belief) -> np.ndarray:
    distribution = belief.state_distribution(lambda state: state[0])
    return np.array([distribution.get(0, 0.0), distribution.get(1, 0.0)])


def labelled(n):
    return [HyperParticle((i,), None) for i in range(n)]


def test_resample_all_weight_on_one(rng):
    belief = belief_service.resample(labelled(3), np.array([0.0, 2.0, 0.0]), 50, rng)
    assert belief.size == 50
    assert all(p.state == (1,) for p in belief.particles)
    assert np.allclose(belief.weights, 1 / 50)


@pytest.mark.parametrize("scheme", list(ResamplingEnum))
def test_resample_even_split(rng, scheme):
    count = 10_000
    belief = belief_service.resample(labelled(2), np.array([0.5, 0.5]), count, rng, scheme)
    zeros = sum(p.state == (0,) for p in belief.particles)
    sigma = math.sqrt(count * 0.25)
    assert abs(zeros - count / 2) <= 4 * sigma
    if scheme == ResamplingEnum.SYSTEMATIC:
        assert zeros == count / 2


def test_resample_preserves_weighted_mean(rng):
    weights = rng.uniform(0, 1, size=20)
    values = np.arange(20, dtype=float)
    belief = belief_service.resample(labelled(20), weights, 20_000, rng)
    resampled_mean = np.mean([p.state[0] for p in belief.particles])
    assert resampled_mean == pytest.approx(np.average(values, weights=weights), abs=0.15)


def test_resample_rejects_bad_input(rng):
    with pytest.raises(BeliefCollapseError):
        belief_service.resample(labelled(2), np.zeros(2), 5, rng)
    with pytest.raises(InvalidArgumentError):
        belief_service.resample(labelled(2), np.ones(2), 0, rng)
    with pytest.raises(EmptyBeliefError):
        belief_service.resample([], np.zeros(0), 5, rng)


def test_importance_sampling_matches_exact_filter(hmm_toy, rng):
    domain, _ = hmm_toy
    model = known_model(domain)
    belief = prior_belief(model, rng, 10_000)
    for o in OBSERVATIONS:
        belief, eta = belief_service.importance_sampling_update(belief, model, 0, (o,), rng)
        assert belief.size == 10_000
        assert np.allclose(belief.weights, 1e-4)
    exact = exact_filter(np.array([0.5, 0.5]), TRANSITION, EMISSION, OBSERVATIONS)
    assert 0.5 * np.abs(frequencies(belief) - exact).sum() <= 0.05


def test_rejection_sampling_matches_exact_filter(hmm_toy, rng):
    domain, _ = hmm_toy
    model = known_model(domain)
    belief = prior_belief(model, rng, 10_000)
    for o in OBSERVATIONS[:3]:
        belief, rate = belief_service.rejection_sampling_update(belief, model, 0, (o,), rng)
        assert 0 < rate <= 1
    exact = exact_filter(np.array([0.5, 0.5]), TRANSITION, EMISSION, OBSERVATIONS[:3])
    assert 0.5 * np.abs(frequencies(belief) - exact).sum() <= 0.05


def test_rejection_acceptance_rate(rng):
    state_space = FactoredSpace.from_arities([("s", 2)])
    observation_space = FactoredSpace.from_arities([("o", 4)])
    topology = Topology.from_lists(state_space, observation_space, [[(0,), ()]])
    dynamics = build_dynamics(
        topology, lambda a, node, values: one_hot(values[0], 2) if node == 0 else uniform(4)
    )
    model = KnownModel(state_space, observation_space, dynamics)
    belief = ParticleBelief.uniform([model.particle((0,)) for _ in range(25_000)])
    _, rate = belief_service.rejection_sampling_update(belief, model, 0, (2,), rng)
    assert rate == pytest.approx(0.25, abs=0.01)


def test_deterministic_observation_is_always_accepted(rng):
    domain, _ = make_hmm_toy(stay=1.0, accuracy=1.0)
    model = known_model(domain)
    belief = ParticleBelief.uniform([model.particle((1,)) for _ in range(20)])
    updated, rate = belief_service.rejection_sampling_update(belief, model, 0, (1,), rng)
    assert rate == 1.0
    assert updated.cumulative_log_likelihood == 0.0
    _, eta = belief_service.importance_sampling_update(belief, model, 0, (1,), rng)
    assert eta == pytest.approx(1.0)


def test_impossible_observation_collapses(rng):
    domain, _ = make_hmm_toy(stay=1.0, accuracy=1.0)
    model = known_model(domain)
    belief = ParticleBelief.uniform([model.particle((1,)) for _ in range(20)])
    with pytest.raises(BeliefCollapseError):
        belief_service.importance_sampling_update(belief, model, 0, (0,), rng)
    with pytest.raises(RejectionTimeoutError):
        belief_service.rejection_sampling_update(belief, model, 0, (0,), rng, max_attempts=3)
    fallback = belief_service.uniform_fallback_update(belief, model, 0, (0,), rng)
    assert fallback.size == 20
    assert np.allclose(fallback.weights, 1 / 20)


def test_log_likelihood_trigger(rng):
    domain, _ = make_hmm_toy(accuracy=0.5)
    model = known_model(domain)
    belief = prior_belief(model, rng, 10)
    assert not belief_service.should_reinvigorate(belief, -20.0)
    steps, total = 0, 0.0
    while not belief_service.should_reinvigorate(belief, -20.0):
        belief, eta = belief_service.importance_sampling_update(belief, model, 0, (0,), rng)
        assert eta == pytest.approx(0.5)
        total += math.log(eta)
        steps += 1
    assert steps == math.ceil(20 / math.log(2))
    assert belief.cumulative_log_likelihood == pytest.approx(total, abs=1e-12)
    assert belief.reset_log_likelihood().cumulative_log_likelihood == 0.0


def test_trigger_thresholds():
    belief = ParticleBelief.uniform(labelled(2), cumulative_log_likelihood=-25.0)
    assert belief_service.should_reinvigorate(belief, -20.0)
    assert not belief_service.should_reinvigorate(belief.reset_log_likelihood(), -20.0)


def test_redraw_keeps_models(small_tiger, rng):
    domain, prior = small_tiger
    belief = ParticleBelief.uniform([prior.sample_particle(rng) for _ in range(30)])
    redrawn = belief_service.redraw_states(
        belief, domain.state_space, domain.initial_state_probs, rng
    )
    assert [p.topology for p in redrawn.particles] == [p.topology for p in belief.particles]
    assert all(a.counts is b.counts for a, b in zip(redrawn.particles, belief.particles))


def test_snapshot_lists_every_particle(small_tiger, rng):
    domain, prior = small_tiger
    belief = ParticleBelief.uniform([prior.sample_particle(rng) for _ in range(3)])
    text = belief_service.dump_snapshot(
        belief, domain.state_space, domain.observation_space, domain.action_names
    )
    lines = text.splitlines()
    assert lines[0].startswith("# particles=3")
    assert sum(line.startswith("particle ") for line in lines) == 3
    assert any("listen:hear<-" in line for line in lines)


def test_particle_belief_validation():
    with pytest.raises(InvalidArgumentError):
        ParticleBelief(labelled(2), np.array([1.0]))
    with pytest.raises(InvalidArgumentError):
        ParticleBelief(labelled(2), np.array([1.0, -1.0]))
    with pytest.raises(BeliefCollapseError):
        ParticleBelief(labelled(2), np.zeros(2)).normalized_weights()
