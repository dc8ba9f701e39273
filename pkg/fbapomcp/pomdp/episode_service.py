import logging
from typing import Optional, Protocol, Sequence, Tuple

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.pomdp.domain_base import DomainSpec
from fbapomcp.pomdp.history import History
from fbapomcp.pomdp.space import FeatureVector


class Agent(Protocol):
    def begin_episode(self) -> None: ...

    def act(self, steps_left: int) -> int: ...

    def observe(self, action: int, observation: FeatureVector) -> Optional[float]:
        """
        Returns the belief update's log step likelihood when the agent tracks one.
        """
        ...

    def end_episode(self) -> None: ...


def discounted_return(rewards: Sequence[float], discount: float) -> float:
    if not 0.0 < discount < 1.0:
        raise InvalidArgumentError(f"Discount must lie in (0, 1), got {discount}")
    total, weight = 0.0, 1.0
    for reward in rewards:
        total += weight * reward
        weight *= discount
    return total


def run_episode(
    env: DomainSpec,
    agent: Agent,
    horizon: int,
    rng: np.random.Generator,
) -> Tuple[float, History]:
    """
    Play one episode until ``horizon`` steps or a terminal transition.
    """
    if horizon <= 0:
        raise InvalidArgumentError(f"Horizon must be positive, got {horizon}")

    state = env.sample_initial_state(rng)
    history = History()
    rewards = []
    agent.begin_episode()
    for t in range(horizon):
        action = agent.act(horizon - t)
        env.check_action(action)
        next_state, observation, reward, terminal = env.step(state, action, rng)
        rewards.append(reward)
        history.append(action, observation)
        log_likelihood = agent.observe(action, observation)
        if log_likelihood is not None:
            history.step_log_likelihoods.append(log_likelihood)
        state = next_state
        if terminal:
            break

    agent.end_episode()

    episode_return = discounted_return(rewards, env.discount)
    logging.debug(
        f"[Episode Service] [Run] {env.name}: {len(history)} steps, return {episode_return:.3f}"
    )
    return episode_return, history
