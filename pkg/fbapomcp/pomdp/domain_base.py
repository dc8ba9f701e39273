from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.common.sampling_utils import sample_categorical
from fbapomcp.models.factored_service import FactoredDynamics
from fbapomcp.pomdp.space import FactoredSpace, FeatureVector


RewardFn = Callable[[FeatureVector, int, FeatureVector], float]
TerminalFn = Callable[[FeatureVector, int, FeatureVector], bool]


@dataclass(frozen=True)
class DomainSpec:
    """
    A factored POMDP <S, A, O, D, R, gamma, h> plus its terminal predicate.

    ``dynamics`` is the true model. Only the environment side (episode runner,
    exact-model baselines, oracles) reads it; learning agents never do.
    Rewards and termination are evaluated on (s, a, s').
    """

    name: str
    state_space: FactoredSpace
    observation_space: FactoredSpace
    action_count: int
    reward: RewardFn
    terminal: TerminalFn
    dynamics: FactoredDynamics
    initial_state_probs: np.ndarray
    discount: float = 0.95
    horizon: int = 30
    action_names: Optional[Sequence[str]] = None
    reward_span: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.discount < 1.0:
            raise InvalidArgumentError(f"Discount must lie in (0, 1), got {self.discount}")
        if self.horizon <= 0:
            raise InvalidArgumentError(f"Horizon must be positive, got {self.horizon}")
        if self.action_count <= 0:
            raise InvalidArgumentError("A domain needs at least one action")
        if self.dynamics.topology.num_actions != self.action_count:
            raise InvalidArgumentError(
                f"Dynamics cover {self.dynamics.topology.num_actions} actions, domain has {self.action_count}"
            )
        if self.initial_state_probs.shape != (self.state_space.size,):
            raise InvalidArgumentError(
                f"Initial distribution has shape {self.initial_state_probs.shape}, "
                f"expected ({self.state_space.size},)"
            )
        if not np.isclose(self.initial_state_probs.sum(), 1.0):
            raise InvalidArgumentError("Initial state distribution must sum to 1")
        if self.action_names is not None and len(self.action_names) != self.action_count:
            raise InvalidArgumentError("One name per action is required")

    def check_action(self, action: int):
        if not 0 <= action < self.action_count:
            raise InvalidArgumentError(
                f"Action {action} out of range [0, {self.action_count})"
            )

    def sample_initial_state(self, rng: np.random.Generator) -> FeatureVector:
        return self.state_space.vector(sample_categorical(self.initial_state_probs, rng))

    def step(
        self, state: FeatureVector, action: int, rng: np.random.Generator
    ) -> Tuple[FeatureVector, FeatureVector, float, bool]:
        """
        Execute one real step: (s', o, r, terminal).
        """
        self.check_action(action)
        next_state, observation = self.dynamics.step(state, action, rng)
        return (
            next_state,
            observation,
            float(self.reward(state, action, next_state)),
            bool(self.terminal(state, action, next_state)),
        )

    def action_name(self, action: int) -> str:
        return self.action_names[action] if self.action_names else str(action)
