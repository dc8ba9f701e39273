from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence

import numpy as np

from fbapomcp.common.exceptions import BeliefCollapseError, EmptyBeliefError, InvalidArgumentError
from fbapomcp.common.sampling_utils import sample_categorical
from fbapomcp.models.hyper_model import HyperParticle


@dataclass
class ParticleBelief:
    """
    Weighted hyper-state particles plus the cumulative log-likelihood of the
    belief updates since the last reinvigoration.
    """

    particles: List[HyperParticle]
    weights: np.ndarray
    cumulative_log_likelihood: float = 0.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (len(self.particles),):
            raise InvalidArgumentError(
                f"{len(self.particles)} particles but weights of shape {self.weights.shape}"
            )
        if np.any(self.weights < 0):
            raise InvalidArgumentError("Particle weights must be nonnegative")

    @classmethod
    def uniform(
        cls, particles: Sequence[HyperParticle], cumulative_log_likelihood: float = 0.0
    ) -> "ParticleBelief":
        particles = list(particles)
        if not particles:
            return cls([], np.zeros(0), cumulative_log_likelihood)
        return cls(
            particles,
            np.full(len(particles), 1.0 / len(particles)),
            cumulative_log_likelihood,
        )

    @property
    def size(self) -> int:
        return len(self.particles)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def normalized_weights(self) -> np.ndarray:
        total = self.total_weight
        if total <= 0:
            raise BeliefCollapseError()
        return self.weights / total

    def sample(self, rng: np.random.Generator) -> HyperParticle:
        if not self.particles:
            raise EmptyBeliefError()
        if self.total_weight <= 0:
            raise BeliefCollapseError()
        return self.particles[sample_categorical(self.weights, rng)]

    def best_particle(self) -> HyperParticle:
        if not self.particles:
            raise EmptyBeliefError()
        return self.particles[int(np.argmax(self.weights))]

    def distinct_topologies(self) -> int:
        """
        Number of different structures in the belief; 0 for structure-free models.
        """
        topologies = {p.topology for p in self.particles if p.topology is not None}
        return len(topologies)

    def state_distribution(self, state_index: Callable[[tuple], int]) -> Dict[int, float]:
        """
        Weighted frequency of each state, keyed by ``state_index(state)``.
        """
        weights = self.normalized_weights()
        distribution: Dict[int, float] = {}
        for particle, weight in zip(self.particles, weights):
            key = state_index(particle.state)
            distribution[key] = distribution.get(key, 0.0) + float(weight)
        return distribution

    def with_states(self, states: Sequence) -> "ParticleBelief":
        return ParticleBelief(
            [p.with_state(s) for p, s in zip(self.particles, states)],
            self.weights.copy(),
            self.cumulative_log_likelihood,
        )

    def reset_log_likelihood(self) -> "ParticleBelief":
        return ParticleBelief(self.particles, self.weights, 0.0)
