import logging
import math
from typing import List, Optional

import numpy as np

from fbapomcp.belief import belief_service
from fbapomcp.belief.belief_model import BeliefUpdateEnum
from fbapomcp.belief.particle_belief import ParticleBelief
from fbapomcp.common.exceptions import BeliefCollapseError, RejectionTimeoutError
from fbapomcp.experiment.experiment_model import ModelClassEnum, StructurePriorEnum
from fbapomcp.experiment.experiment_schema import AgentProfile, ExperimentConfig
from fbapomcp.models.hyper_model import (
    FactoredModel,
    HyperModel,
    KnownModel,
    TabularModel,
    tabular_particle,
)
from fbapomcp.models.prior_base import PriorSpec
from fbapomcp.planning.pomcp_schema import PlannerConfig
from fbapomcp.planning.pomcp_service import ModelSimulator, plan
from fbapomcp.pomdp.domain_base import DomainSpec
from fbapomcp.pomdp.history import History
from fbapomcp.pomdp.space import FeatureVector
from fbapomcp.reinvigoration.gibbs_schema import GibbsConfig
from fbapomcp.reinvigoration.gibbs_service import reinvigorate_belief


def build_model(domain: DomainSpec, model_class: ModelClassEnum) -> HyperModel:
    if model_class == ModelClassEnum.TABULAR:
        return TabularModel(domain.state_space, domain.observation_space)
    if model_class == ModelClassEnum.FACTORED:
        return FactoredModel(domain.state_space, domain.observation_space)
    return KnownModel(domain.state_space, domain.observation_space, domain.dynamics)


def initial_belief(
    model: HyperModel, prior: PriorSpec, num_particles: int, rng: np.random.Generator
) -> ParticleBelief:
    if isinstance(model, KnownModel):
        particles = [model.particle(prior.sample_state(rng)) for _ in range(num_particles)]
    elif isinstance(model, TabularModel):
        counts = prior.tabular_prior()
        particles = [tabular_particle(prior.sample_state(rng), counts) for _ in range(num_particles)]
    else:
        particles = [prior.sample_particle(rng) for _ in range(num_particles)]
    return ParticleBelief.uniform(particles)


class BayesAgent:
    """
    Plans with POMCP over a particle belief of hyper-states and learns the
    dynamics from its own action-observation stream. The belief, and with it
    everything learned, persists across episodes.
    """

    def __init__(
        self,
        domain: DomainSpec,
        prior: PriorSpec,
        profile: AgentProfile,
        config: ExperimentConfig,
        rng: np.random.Generator,
    ):
        self.domain = domain
        self.profile = profile
        self.rng = rng
        self.prior = (
            prior.known_structure()
            if profile.structure_prior == StructurePriorEnum.KNOWN
            else prior
        )
        self.model = build_model(domain, profile.model_class)
        self.simulator = ModelSimulator(domain, self.model)
        self.planner = PlannerConfig(
            num_simulations=config.planner.num_simulations,
            ucb_constant=config.planner.ucb_constant or domain.reward_span,
            rollout_depth=config.planner.rollout_depth,
            discount=domain.discount,
            horizon=domain.horizon,
        )
        self.belief_config = config.belief
        self.gibbs = GibbsConfig(
            burn_in=config.reinvigoration.burn_in,
            mh_steps=config.reinvigoration.mh_steps,
            num_particles=config.belief.num_particles,
            threshold=config.reinvigoration.threshold,
            seed_from=config.reinvigoration.seed_from,
            replace_fraction=config.reinvigoration.replace_fraction,
        )
        self.belief = initial_belief(self.model, self.prior, config.belief.num_particles, rng)
        self.histories: List[History] = []
        self.reinvigorated = False

    @property
    def topology_count(self) -> int:
        return self.belief.distinct_topologies()

    def begin_episode(self) -> None:
        self.histories.append(History())
        self.reinvigorated = False
        self.belief = belief_service.redraw_states(
            self.belief, self.domain.state_space, self.domain.initial_state_probs, self.rng
        )

    def act(self, steps_left: int) -> int:
        action = plan(self.belief, self.simulator, self.planner.with_horizon(steps_left), self.rng)
        logging.debug(
            f"[Agent Service] [Act] {self.domain.action_name(action)} with {steps_left} steps left"
        )
        return action

    def observe(self, action: int, observation: FeatureVector) -> Optional[float]:
        self.histories[-1].append(action, observation)
        try:
            step_log_likelihood = self._update(action, observation)
        except (BeliefCollapseError, RejectionTimeoutError) as e:
            if self.profile.reinvigorate:
                self._reinvigorate()
            else:
                logging.warning(
                    f"[Agent Service] [Observe] {e.message}; keeping propagated particles"
                )
                self.belief = belief_service.uniform_fallback_update(
                    self.belief, self.model, action, observation, self.rng
                )
            return None

        if self.profile.reinvigorate and belief_service.should_reinvigorate(
            self.belief, self.gibbs.threshold
        ):
            self._reinvigorate()
        return step_log_likelihood

    def end_episode(self) -> None:
        logging.debug(
            f"[Agent Service] [EndEpisode] {len(self.histories)} episodes seen, "
            f"{self.topology_count} topologies in belief"
        )

    def _update(self, action: int, observation: FeatureVector) -> float:
        if self.belief_config.update == BeliefUpdateEnum.REJECTION:
            self.belief, rate = belief_service.rejection_sampling_update(
                self.belief,
                self.model,
                action,
                observation,
                self.rng,
                self.belief_config.rejection_max_attempts,
            )
            return math.log(rate)
        self.belief, eta = belief_service.importance_sampling_update(
            self.belief, self.model, action, observation, self.rng, self.belief_config.resampling
        )
        return math.log(eta)

    def _reinvigorate(self):
        self.belief = reinvigorate_belief(
            self.belief, self.histories, self.prior, self.gibbs, self.rng
        )
        self.reinvigorated = True
