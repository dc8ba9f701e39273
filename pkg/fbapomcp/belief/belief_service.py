"""
Belief tracking over hyper-state particles.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from fbapomcp.belief.belief_model import ResamplingEnum
from fbapomcp.belief.particle_belief import ParticleBelief
from fbapomcp.common.exceptions import (
    BeliefCollapseError,
    EmptyBeliefError,
    InvalidArgumentError,
    RejectionTimeoutError,
)
from fbapomcp.common.sampling_utils import sample_categorical
from fbapomcp.config import settings
from fbapomcp.models.hyper_model import HyperModel, HyperParticle
from fbapomcp.pomdp.space import FactoredSpace, FeatureVector


def systematic_indices(weights: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    One uniform offset, ``count`` evenly spaced positions over the weight CDF.
    """
    positions = (rng.random() + np.arange(count)) / count
    cumulative = np.cumsum(weights) / weights.sum()
    indices = np.searchsorted(cumulative, positions, side="right")
    return np.minimum(indices, len(weights) - 1)


def multinomial_indices(weights: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    cumulative = np.cumsum(weights) / weights.sum()
    indices = np.searchsorted(cumulative, rng.random(count), side="right")
    return np.minimum(indices, len(weights) - 1)


def resample(
    particles: Sequence[HyperParticle],
    weights: np.ndarray,
    count: int,
    rng: np.random.Generator,
    scheme: ResamplingEnum = ResamplingEnum(settings.RESAMPLING),
    cumulative_log_likelihood: float = 0.0,
) -> ParticleBelief:
    weights = np.asarray(weights, dtype=float)
    if count <= 0:
        raise InvalidArgumentError(f"Particle count must be positive, got {count}")
    if len(particles) == 0:
        raise EmptyBeliefError()
    if not weights.sum() > 0:
        raise BeliefCollapseError()
    if ResamplingEnum(scheme) == ResamplingEnum.SYSTEMATIC:
        indices = systematic_indices(weights, count, rng)
    else:
        indices = multinomial_indices(weights, count, rng)
    return ParticleBelief.uniform([particles[i] for i in indices], cumulative_log_likelihood)


def _propagate(
    belief: ParticleBelief,
    model: HyperModel,
    action: int,
    observation: FeatureVector,
    rng: np.random.Generator,
) -> Tuple[List[Optional[FeatureVector]], np.ndarray]:
    next_states: List[Optional[FeatureVector]] = []
    weights = np.zeros(belief.size)
    for i, (particle, weight) in enumerate(zip(belief.particles, belief.weights)):
        if weight <= 0:
            next_states.append(None)
            continue
        next_state = model.propagate(particle, action, rng)
        next_states.append(next_state)
        weights[i] = weight * model.observation_likelihood(particle, action, next_state, observation)
    return next_states, weights


def importance_sampling_update(
    belief: ParticleBelief,
    model: HyperModel,
    action: int,
    observation: FeatureVector,
    rng: np.random.Generator,
    resampling: ResamplingEnum = ResamplingEnum(settings.RESAMPLING),
) -> Tuple[ParticleBelief, float]:
    """
    Propagate every particle, weight it by the observation likelihood under its
    own model, add the real transition to its counts, then resample.

    Returns the new belief and the step likelihood eta (sum of new weights).
    """
    if belief.size == 0:
        raise EmptyBeliefError()
    next_states, weights = _propagate(belief, model, action, observation, rng)
    eta = float(weights.sum())
    if eta <= 0:
        logging.warning(
            f"[Belief Service] [ImportanceSampling] observation {observation} after action {action} "
            f"has zero likelihood under all {belief.size} particles"
        )
        raise BeliefCollapseError()

    # only particles that can be drawn need their counts updated
    survivors = {}
    for i in np.flatnonzero(weights):
        survivors[i] = model.absorb(belief.particles[i], action, next_states[i], observation)
    updated = [survivors.get(i, belief.particles[i]) for i in range(belief.size)]

    resampled = resample(
        updated,
        weights,
        belief.size,
        rng,
        resampling,
        belief.cumulative_log_likelihood + math.log(eta),
    )
    return resampled, eta


def rejection_sampling_update(
    belief: ParticleBelief,
    model: HyperModel,
    action: int,
    observation: FeatureVector,
    rng: np.random.Generator,
    max_attempts: int = settings.REJECTION_MAX_ATTEMPTS,
) -> Tuple[ParticleBelief, float]:
    """
    Simulate particles until ``belief.size`` of them reproduce the observation.

    Returns the new belief and the acceptance rate.
    """
    if belief.size == 0:
        raise EmptyBeliefError()
    budget = max_attempts * belief.size
    accepted: List[HyperParticle] = []
    attempts = 0
    target = tuple(observation)
    while len(accepted) < belief.size:
        if attempts >= budget:
            logging.warning(
                f"[Belief Service] [RejectionSampling] accepted {len(accepted)}/{belief.size} "
                f"after {attempts} attempts"
            )
            raise RejectionTimeoutError(
                f"Only {len(accepted)} of {belief.size} particles accepted in {attempts} attempts"
            )
        attempts += 1
        next_particle, simulated = model.simulate(belief.sample(rng), action, rng)
        if tuple(simulated) == target:
            accepted.append(next_particle)
    rate = len(accepted) / attempts
    return (
        ParticleBelief.uniform(accepted, belief.cumulative_log_likelihood + math.log(rate)),
        rate,
    )


def uniform_fallback_update(
    belief: ParticleBelief,
    model: HyperModel,
    action: int,
    observation: FeatureVector,
    rng: np.random.Generator,
) -> ParticleBelief:
    """
    Keep every propagated particle with equal weight when the observation is
    impossible under all of them.
    """
    particles = [
        model.absorb(p, action, model.propagate(p, action, rng), observation)
        for p in belief.particles
    ]
    return ParticleBelief.uniform(particles, belief.cumulative_log_likelihood)


def should_reinvigorate(
    belief: ParticleBelief, threshold: float = settings.REINVIGORATION_THRESHOLD
) -> bool:
    return belief.cumulative_log_likelihood < threshold


def redraw_states(
    belief: ParticleBelief,
    state_space: FactoredSpace,
    initial_state_probs: np.ndarray,
    rng: np.random.Generator,
) -> ParticleBelief:
    """
    Episode start: fresh states from b0, structures and counts kept.
    """
    states = [
        state_space.vector(sample_categorical(initial_state_probs, rng))
        for _ in range(belief.size)
    ]
    return belief.with_states(states)


def dump_snapshot(
    belief: ParticleBelief,
    state_space: FactoredSpace,
    observation_space: FactoredSpace,
    action_names: Optional[Sequence[str]] = None,
) -> str:
    """
    One block per particle: weight and state, then the topology edge list.
    """
    lines = [f"# particles={belief.size} log_likelihood={belief.cumulative_log_likelihood:.6f}"]
    for i, (particle, weight) in enumerate(zip(belief.particles, belief.weights)):
        state = " ".join(f"{name}={value}" for name, value in zip(state_space.names, particle.state))
        lines.append(f"particle {i} weight={weight:.6g} {state}")
        if particle.topology is not None:
            lines.extend(
                f"  {edge}"
                for edge in particle.topology.to_text(
                    state_space, observation_space, action_names
                ).splitlines()
            )
    return "\n".join(lines)
