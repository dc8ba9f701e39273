"""
POMCP over hyper-states.

The search is generic over a ``Simulator``: plugging in a tabular, factored or
known model gives BA-POMCP, FBA-POMCP or plain POMCP. Every simulation runs on
a scratch fork of a belief particle, so imagined count updates never reach
the belief.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Protocol, Tuple

import numpy as np

from fbapomcp.belief.particle_belief import ParticleBelief
from fbapomcp.common.exceptions import EmptyBeliefError
from fbapomcp.models.hyper_model import HyperModel, HyperParticle
from fbapomcp.planning.pomcp_schema import PlannerConfig
from fbapomcp.pomdp.domain_base import DomainSpec
from fbapomcp.pomdp.space import FeatureVector


class StepOutcome(NamedTuple):
    particle: HyperParticle
    observation: FeatureVector
    reward: float
    terminal: bool


class Simulator(Protocol):
    num_actions: int

    def fork(self, particle: HyperParticle) -> HyperParticle: ...

    def step(
        self, particle: HyperParticle, action: int, rng: np.random.Generator
    ) -> StepOutcome: ...


class ModelSimulator:
    """
    Generative step of a hyper-model, scored with the domain's known rewards.
    """

    def __init__(self, domain: DomainSpec, model: HyperModel):
        self.domain = domain
        self.model = model
        self.num_actions = domain.action_count

    def fork(self, particle: HyperParticle) -> HyperParticle:
        return self.model.scratch(particle)

    def step(
        self, particle: HyperParticle, action: int, rng: np.random.Generator
    ) -> StepOutcome:
        next_particle, observation = self.model.simulate(particle, action, rng)
        return StepOutcome(
            next_particle,
            observation,
            self.domain.reward(particle.state, action, next_particle.state),
            self.domain.terminal(particle.state, action, next_particle.state),
        )


@dataclass
class ActionStats:
    visits: int = 0
    mean_return: float = 0.0

    def update(self, value: float):
        self.visits += 1
        self.mean_return += (value - self.mean_return) / self.visits


@dataclass
class SearchNode:
    num_actions: int
    visit_count: int = 0
    actions: List[ActionStats] = field(default_factory=list)
    children: Dict[Tuple[int, FeatureVector], "SearchNode"] = field(default_factory=dict)

    def __post_init__(self):
        if not self.actions:
            self.actions = [ActionStats() for _ in range(self.num_actions)]

    def child(self, action: int, observation: FeatureVector) -> Optional["SearchNode"]:
        return self.children.get((action, tuple(observation)))

    def add_child(self, action: int, observation: FeatureVector) -> "SearchNode":
        node = SearchNode(self.num_actions)
        self.children[(action, tuple(observation))] = node
        return node

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children.values())

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children.values()), default=0)


def ucb_select(node: SearchNode, ucb_constant: float) -> int:
    """
    argmax_a Q(a) + u * sqrt(ln N / n_a); untried actions first, in index order.
    """
    for action, stats in enumerate(node.actions):
        if stats.visits == 0:
            return action
    log_visits = math.log(node.visit_count)
    scores = [
        stats.mean_return + ucb_constant * math.sqrt(log_visits / stats.visits)
        for stats in node.actions
    ]
    return int(np.argmax(scores))


def rollout(
    particle: HyperParticle,
    depth: int,
    simulator: Simulator,
    config: PlannerConfig,
    rng: np.random.Generator,
) -> float:
    total, weight = 0.0, 1.0
    while depth < config.max_depth:
        action = int(rng.integers(simulator.num_actions))
        outcome = simulator.step(particle, action, rng)
        total += weight * outcome.reward
        if outcome.terminal:
            break
        weight *= config.discount
        particle = outcome.particle
        depth += 1
    return total


def simulate(
    particle: HyperParticle,
    node: SearchNode,
    depth: int,
    simulator: Simulator,
    config: PlannerConfig,
    rng: np.random.Generator,
) -> float:
    """
    One UCB descent; expands at most one node, estimated by a random rollout.
    """
    if depth >= config.max_depth:
        return 0.0

    action = ucb_select(node, config.ucb_constant)
    outcome = simulator.step(particle, action, rng)
    if outcome.terminal:
        future = 0.0
    else:
        child = node.child(action, outcome.observation)
        if child is None:
            node.add_child(action, outcome.observation)
            future = rollout(outcome.particle, depth + 1, simulator, config, rng)
        else:
            future = simulate(outcome.particle, child, depth + 1, simulator, config, rng)

    value = outcome.reward + config.discount * future
    node.visit_count += 1
    node.actions[action].update(value)
    return value


def search(
    belief: ParticleBelief,
    simulator: Simulator,
    config: PlannerConfig,
    rng: np.random.Generator,
) -> SearchNode:
    if belief.size == 0:
        raise EmptyBeliefError("Cannot plan from an empty belief")
    root = SearchNode(simulator.num_actions)
    for _ in range(config.num_simulations):
        particle = simulator.fork(belief.sample(rng))
        simulate(particle, root, 0, simulator, config, rng)
    return root


def best_action(node: SearchNode) -> int:
    scores = [
        stats.mean_return if stats.visits > 0 else -math.inf for stats in node.actions
    ]
    return int(np.argmax(scores))


def plan(
    belief: ParticleBelief,
    simulator: Simulator,
    config: PlannerConfig,
    rng: np.random.Generator,
) -> int:
    root = search(belief, simulator, config, rng)
    action = best_action(root)
    if logging.getLogger().isEnabledFor(logging.DEBUG):
        logging.debug(
            f"[POMCP Service] [Plan] action {action}, "
            f"Q={[round(s.mean_return, 3) for s in root.actions]}, "
            f"n={[s.visits for s in root.actions]}, tree size {root.size()}"
        )
    return action
