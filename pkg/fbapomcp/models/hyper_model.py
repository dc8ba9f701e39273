"""
Hyper-state models: how a belief particle <s, (G,) chi> moves through one step.

``TabularModel`` is the BA-POMDP, ``FactoredModel`` the FBA-POMDP and
``KnownModel`` plain POMCP on fixed CPTs. Planner, belief and agents only
talk to the ``HyperModel`` interface.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from fbapomcp.common.sampling_utils import sample_categorical
from fbapomcp.models import factored_service, tabular_service
from fbapomcp.models.count_overlay import RowOverlayCounts
from fbapomcp.models.factored_counts import FactoredCounts
from fbapomcp.models.factored_service import FactoredDynamics
from fbapomcp.models.tabular_counts import TabularCounts
from fbapomcp.models.topology import Topology
from fbapomcp.pomdp.space import FactoredSpace, FeatureVector


@dataclass(frozen=True)
class HyperParticle:
    state: FeatureVector
    counts: RowOverlayCounts
    topology: Optional[Topology] = None

    def with_state(self, state: FeatureVector) -> "HyperParticle":
        return replace(self, state=tuple(state))


class HyperModel(ABC):
    def __init__(self, state_space: FactoredSpace, observation_space: FactoredSpace):
        self.state_space = state_space
        self.observation_space = observation_space

    @property
    @abstractmethod
    def kind(self) -> str:
        pass

    @abstractmethod
    def simulate(
        self, particle: HyperParticle, action: int, rng: np.random.Generator
    ) -> Tuple[HyperParticle, FeatureVector]:
        """
        One generative step of the hyper-state, counts included.
        """

    @abstractmethod
    def propagate(
        self, particle: HyperParticle, action: int, rng: np.random.Generator
    ) -> FeatureVector:
        """
        Sample s' from the particle's expected transition model only.
        """

    @abstractmethod
    def observation_likelihood(
        self,
        particle: HyperParticle,
        action: int,
        next_state: FeatureVector,
        observation: FeatureVector,
    ) -> float:
        pass

    @abstractmethod
    def absorb(
        self,
        particle: HyperParticle,
        action: int,
        next_state: FeatureVector,
        observation: FeatureVector,
    ) -> HyperParticle:
        """
        Move to s' and add the real transition to a persistent copy of the counts.
        """

    def scratch(self, particle: HyperParticle) -> HyperParticle:
        return replace(particle, counts=particle.counts.scratch())


class TabularModel(HyperModel):
    @property
    def kind(self) -> str:
        return "tabular"

    def _state_index(self, particle: HyperParticle) -> int:
        return self.state_space.index(particle.state)

    def simulate(
        self, particle: HyperParticle, action: int, rng: np.random.Generator
    ) -> Tuple[HyperParticle, FeatureVector]:
        next_state, counts, observation = tabular_service.ba_pomcp_step(
            self._state_index(particle), particle.counts, action, rng
        )
        return (
            HyperParticle(self.state_space.vector(next_state), counts),
            self.observation_space.vector(observation),
        )

    def propagate(
        self, particle: HyperParticle, action: int, rng: np.random.Generator
    ) -> FeatureVector:
        joint = tabular_service.expected_row(particle.counts, self._state_index(particle), action)
        return self.state_space.vector(sample_categorical(joint.sum(axis=1), rng))

    def observation_likelihood(
        self,
        particle: HyperParticle,
        action: int,
        next_state: FeatureVector,
        observation: FeatureVector,
    ) -> float:
        joint = tabular_service.expected_row(particle.counts, self._state_index(particle), action)
        given = joint[self.state_space.index(next_state)]
        total = given.sum()
        if total <= 0:
            return 0.0
        return float(given[self.observation_space.index(observation)] / total)

    def absorb(
        self,
        particle: HyperParticle,
        action: int,
        next_state: FeatureVector,
        observation: FeatureVector,
    ) -> HyperParticle:
        counts = tabular_service.update_counts(
            particle.counts,
            self._state_index(particle),
            action,
            self.state_space.index(next_state),
            self.observation_space.index(observation),
        )
        return HyperParticle(tuple(next_state), counts)


class FactoredModel(HyperModel):
    @property
    def kind(self) -> str:
        return "factored"

    def simulate(
        self, particle: HyperParticle, action: int, rng: np.random.Generator
    ) -> Tuple[HyperParticle, FeatureVector]:
        next_state, counts, observation = factored_service.fba_pomcp_step(
            particle.state, particle.topology, particle.counts, action, rng
        )
        return replace(particle, state=next_state, counts=counts), observation

    def propagate(
        self, particle: HyperParticle, action: int, rng: np.random.Generator
    ) -> FeatureVector:
        next_state, _ = factored_service.sample_next_state(
            particle.topology, particle.counts, particle.state, action, rng
        )
        return next_state

    def observation_likelihood(
        self,
        particle: HyperParticle,
        action: int,
        next_state: FeatureVector,
        observation: FeatureVector,
    ) -> float:
        return factored_service.observation_likelihood(
            particle.topology, particle.counts, action, next_state, observation
        )

    def absorb(
        self,
        particle: HyperParticle,
        action: int,
        next_state: FeatureVector,
        observation: FeatureVector,
    ) -> HyperParticle:
        increments = factored_service.transition_increments(
            particle.topology, particle.state, action, next_state, observation
        )
        return replace(particle, state=tuple(next_state), counts=particle.counts.incremented(increments))


class KnownModel(FactoredModel):
    """
    Fixed true CPTs: particles only carry a state, nothing is learned.
    """

    def __init__(
        self,
        state_space: FactoredSpace,
        observation_space: FactoredSpace,
        dynamics: FactoredDynamics,
    ):
        super().__init__(state_space, observation_space)
        self.dynamics = dynamics

    @property
    def kind(self) -> str:
        return "known"

    def particle(self, state: FeatureVector) -> HyperParticle:
        return HyperParticle(tuple(state), self.dynamics.cpts, self.dynamics.topology)

    def simulate(
        self, particle: HyperParticle, action: int, rng: np.random.Generator
    ) -> Tuple[HyperParticle, FeatureVector]:
        next_state, observation = self.dynamics.step(particle.state, action, rng)
        return particle.with_state(next_state), observation

    def absorb(
        self,
        particle: HyperParticle,
        action: int,
        next_state: FeatureVector,
        observation: FeatureVector,
    ) -> HyperParticle:
        return particle.with_state(next_state)

    def scratch(self, particle: HyperParticle) -> HyperParticle:
        return particle


def tabular_particle(state: FeatureVector, counts: TabularCounts) -> HyperParticle:
    return HyperParticle(tuple(state), counts)


def factored_particle(
    state: FeatureVector, topology: Topology, counts: FactoredCounts
) -> HyperParticle:
    return HyperParticle(tuple(state), counts, topology)
