"""
MH-within-Gibbs reinvigoration of a degenerate belief.

Each sweep alternates (i) drawing the hidden state sequences of every
recorded episode from the HMM defined by the current expected model,
(ii) Metropolis-Hastings moves over the topology scored by the
Bayesian-Dirichlet marginal likelihood and (iii) recomputing the counts as
prior plus tallies. Post burn-in sweeps each emit one particle.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from fbapomcp.belief.belief_service import dump_snapshot, resample
from fbapomcp.belief.particle_belief import ParticleBelief
from fbapomcp.common.exceptions import InfeasibleHistoryError, InvalidArgumentError
from fbapomcp.common.sampling_utils import sample_categorical
from fbapomcp.models.factored_counts import FactoredCounts
from fbapomcp.models.factored_service import (
    count_transitions,
    expected_observation_likelihoods,
    expected_transition_matrix,
    node_bd_score_log,
    tally_node,
)
from fbapomcp.models.hyper_model import HyperParticle, factored_particle
from fbapomcp.models.prior_base import PriorSpec
from fbapomcp.models.topology import Topology
from fbapomcp.pomdp.history import AnnotatedEpisode, History, TransitionBatch
from fbapomcp.pomdp.space import FactoredSpace, FeatureVector
from fbapomcp.reinvigoration.gibbs_model import SeedSourceEnum
from fbapomcp.reinvigoration.gibbs_schema import GibbsConfig


class ExpectedDynamics:
    """
    Expected transition matrices and observation likelihood vectors of one
    fixed <G, chi>, computed lazily over the enumerated state space.
    """

    def __init__(self, topology: Topology, counts: FactoredCounts, state_space: FactoredSpace):
        self.topology = topology
        self.counts = counts
        self.vectors = state_space.all_vectors()
        self._transitions: Dict[int, np.ndarray] = {}
        self._observations: Dict[Tuple[int, FeatureVector], np.ndarray] = {}

    def transition(self, action: int) -> np.ndarray:
        if action not in self._transitions:
            self._transitions[action] = expected_transition_matrix(
                self.topology, self.counts, action, self.vectors
            )
        return self._transitions[action]

    def observation(self, action: int, observation: FeatureVector) -> np.ndarray:
        key = (action, tuple(observation))
        if key not in self._observations:
            self._observations[key] = expected_observation_likelihoods(
                self.topology, self.counts, action, observation, self.vectors
            )
        return self._observations[key]


@dataclass
class GibbsState:
    topology: Topology
    counts: FactoredCounts
    sequences: List[List[FeatureVector]] = field(default_factory=list)
    sweep: int = 0


def sample_state_sequence(
    topology: Topology,
    counts: FactoredCounts,
    actions: Sequence[int],
    observations: Sequence[FeatureVector],
    initial_state_probs: np.ndarray,
    state_space: FactoredSpace,
    rng: np.random.Generator,
    dynamics: Optional[ExpectedDynamics] = None,
) -> List[FeatureVector]:
    """
    Exact draw of s_0..s_T given the actions and observations under the fixed
    expected model: normalized backward messages, then forward sampling.
    """
    if len(actions) != len(observations):
        raise InvalidArgumentError(
            f"{len(actions)} actions but {len(observations)} observations"
        )
    dynamics = dynamics or ExpectedDynamics(topology, counts, state_space)
    horizon = len(actions)

    betas = np.empty((horizon + 1, state_space.size))
    betas[horizon] = 1.0
    for t in reversed(range(horizon)):
        evidence = dynamics.observation(actions[t], observations[t]) * betas[t + 1]
        beta = dynamics.transition(actions[t]) @ evidence
        total = beta.sum()
        if total <= 0:
            raise InfeasibleHistoryError(
                f"Observation {observations[t]} at step {t} is impossible under the model"
            )
        betas[t] = beta / total

    first = initial_state_probs * betas[0]
    if first.sum() <= 0:
        raise InfeasibleHistoryError("No initial state explains the observations")
    index = sample_categorical(first, rng)
    indices = [index]
    for t in range(horizon):
        posterior = (
            dynamics.transition(actions[t])[index]
            * dynamics.observation(actions[t], observations[t])
            * betas[t + 1]
        )
        index = sample_categorical(posterior, rng)
        indices.append(index)
    return [state_space.vector(i) for i in indices]


def _mh_move(
    topology: Topology,
    batch: TransitionBatch,
    prior: PriorSpec,
    rng: np.random.Generator,
) -> Topology:
    units = prior.constraints.flip_units()
    if not units:
        return topology
    proposal = topology.flipped_group(units[int(rng.integers(len(units)))])

    # only the flipped nodes' factors differ between the two BD scores
    log_ratio = 0.0
    for action, node in topology.differing_nodes(proposal):
        current_parents = topology.parents[action][node]
        proposed_parents = proposal.parents[action][node]
        log_ratio += node_bd_score_log(
            prior.node_prior(action, node, proposed_parents),
            tally_node(batch, topology, action, node, proposed_parents),
        ) - node_bd_score_log(
            prior.node_prior(action, node, current_parents),
            tally_node(batch, topology, action, node, current_parents),
        )
    if log_ratio >= 0 or rng.random() < math.exp(log_ratio):
        return proposal
    return topology


def mh_structure_step(
    topology: Topology,
    episodes: Sequence[AnnotatedEpisode],
    prior: PriorSpec,
    rng: np.random.Generator,
) -> Topology:
    """
    Flip one uniformly chosen mutable edge or edge group; accept with
    min(1, BD ratio).
    """
    batch = TransitionBatch.from_episodes(
        episodes, topology.num_state_features, topology.num_observation_features
    )
    return _mh_move(topology, batch, prior, rng)


def gibbs_sweep(
    state: GibbsState,
    histories: Sequence[History],
    prior: PriorSpec,
    mh_steps: int,
    rng: np.random.Generator,
) -> GibbsState:
    dynamics = ExpectedDynamics(state.topology, state.counts, prior.state_space)
    sequences = [
        sample_state_sequence(
            state.topology,
            state.counts,
            history.actions,
            history.observations,
            prior.initial_state_probs,
            prior.state_space,
            rng,
            dynamics,
        )
        for history in histories
    ]
    episodes = [
        AnnotatedEpisode(sequence, history.actions, history.observations)
        for sequence, history in zip(sequences, histories)
    ]
    topology = state.topology
    if mh_steps > 0:
        batch = TransitionBatch.from_episodes(
            episodes, topology.num_state_features, topology.num_observation_features
        )
        for _ in range(mh_steps):
            topology = _mh_move(topology, batch, prior, rng)
    counts = count_transitions(episodes, topology, prior.prior_counts(topology))
    return GibbsState(topology, counts, sequences, state.sweep + 1)


def gibbs_reinvigorate(
    histories: Sequence[History],
    prior: PriorSpec,
    config: GibbsConfig,
    rng: np.random.Generator,
    seed: Optional[HyperParticle] = None,
) -> List[HyperParticle]:
    """
    Emit ``config.num_particles`` equally weighted particles <s_T, G, chi>,
    where s_T is the last state of the last (current) episode.
    """
    if config.num_particles <= 0:
        raise InvalidArgumentError("Reinvigoration needs at least one emitted particle")
    histories = list(histories)
    if sum(len(h) for h in histories) == 0:
        return [prior.sample_particle(rng) for _ in range(config.num_particles)]

    if seed is None or seed.topology is None:
        seed = prior.sample_particle(rng)
    state = GibbsState(seed.topology, seed.counts)
    emitted: List[HyperParticle] = []
    for sweep in range(config.burn_in + config.num_particles):
        state = gibbs_sweep(state, histories, prior, config.mh_steps, rng)
        if sweep >= config.burn_in:
            emitted.append(factored_particle(state.sequences[-1][-1], state.topology, state.counts))
    return emitted


def reinvigorate_belief(
    belief: ParticleBelief,
    histories: Sequence[History],
    prior: PriorSpec,
    config: GibbsConfig,
    rng: np.random.Generator,
) -> ParticleBelief:
    """
    Replace (a share of) the belief with fresh Gibbs samples; the
    log-likelihood trigger restarts from zero.
    """
    size = belief.size or config.num_particles
    fresh_count = max(1, int(round(config.replace_fraction * size)))
    seed = (
        belief.best_particle()
        if config.seed_from == SeedSourceEnum.BELIEF and belief.size
        else None
    )
    fresh = gibbs_reinvigorate(
        histories, prior, config.model_copy(update={"num_particles": fresh_count}), rng, seed
    )
    kept: List[HyperParticle] = []
    if fresh_count < size and belief.size:
        kept = resample(
            belief.particles, belief.weights, size - fresh_count, rng
        ).particles
    reinvigorated = ParticleBelief.uniform(kept + fresh)
    logging.info(
        f"[Gibbs Service] [Reinvigorate] log-likelihood {belief.cumulative_log_likelihood:.2f} "
        f"after {sum(len(h) for h in histories)} steps; topologies "
        f"{belief.distinct_topologies()} -> {reinvigorated.distinct_topologies()}"
    )
    if logging.getLogger().isEnabledFor(logging.DEBUG):
        snapshot = dump_snapshot(reinvigorated, prior.state_space, prior.observation_space)
        logging.debug(f"[Gibbs Service] [Reinvigorate] belief after reinvigoration\n{snapshot}")
    return reinvigorated
