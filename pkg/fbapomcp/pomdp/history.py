from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.pomdp.space import FeatureVector


@dataclass
class History:
    """
    The real action-observation record of one episode.
    """

    actions: List[int] = field(default_factory=list)
    observations: List[FeatureVector] = field(default_factory=list)
    step_log_likelihoods: List[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.actions)

    def append(self, action: int, observation: FeatureVector):
        self.actions.append(action)
        self.observations.append(tuple(observation))


@dataclass(frozen=True)
class AnnotatedEpisode:
    """
    An episode with a (sampled or true) state sequence: ``len(states) == len(actions) + 1``.
    """

    states: Sequence[FeatureVector]
    actions: Sequence[int]
    observations: Sequence[FeatureVector]

    def __post_init__(self):
        if len(self.actions) != len(self.observations):
            raise InvalidArgumentError(
                f"{len(self.actions)} actions but {len(self.observations)} observations"
            )
        if len(self.states) != len(self.actions) + 1:
            raise InvalidArgumentError(
                f"Expected {len(self.actions) + 1} states, got {len(self.states)}"
            )


@dataclass(frozen=True)
class TransitionBatch:
    """
    Every (s, a, s', o) of a set of episodes stacked into arrays.
    """

    states: np.ndarray
    actions: np.ndarray
    next_states: np.ndarray
    observations: np.ndarray

    @classmethod
    def from_episodes(
        cls,
        episodes: Sequence[AnnotatedEpisode],
        num_state_features: int,
        num_observation_features: int,
    ) -> "TransitionBatch":
        states, actions, next_states, observations = [], [], [], []
        for episode in episodes:
            for t, action in enumerate(episode.actions):
                states.append(episode.states[t])
                actions.append(action)
                next_states.append(episode.states[t + 1])
                observations.append(episode.observations[t])
        return cls(
            np.asarray(states, dtype=np.int64).reshape(-1, num_state_features),
            np.asarray(actions, dtype=np.int64),
            np.asarray(next_states, dtype=np.int64).reshape(-1, num_state_features),
            np.asarray(observations, dtype=np.int64).reshape(-1, num_observation_features),
        )

    def __len__(self) -> int:
        return len(self.actions)
