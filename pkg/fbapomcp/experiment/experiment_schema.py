from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fbapomcp.belief.belief_model import BeliefUpdateEnum, ResamplingEnum
from fbapomcp.config import settings
from fbapomcp.domains.domain_model import DomainEnum
from fbapomcp.experiment.experiment_model import AgentEnum, ModelClassEnum, StructurePriorEnum
from fbapomcp.reinvigoration.gibbs_model import SeedSourceEnum


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class TigerSection(Section):
    n_dummy: int = Field(7, ge=0, description="Uninformative binary state features")


class CollisionSection(Section):
    width: int = Field(5, ge=2)
    height: int = Field(5, ge=3)


class GridSection(Section):
    size: int = Field(5, ge=2)
    goals: Optional[List[Tuple[int, int]]] = Field(None, description="Goal candidates as x:y")
    traps: Optional[List[Tuple[int, int]]] = Field(None, description="Trap cells as x:y")

    @field_validator("goals", "traps", mode="before")
    @classmethod
    def parse_cells(cls, value):
        if isinstance(value, str):
            cells = []
            for item in filter(None, (v.strip() for v in value.split(","))):
                x, _, y = item.partition(":")
                cells.append((int(x), int(y)))
            return cells
        return value


class PlannerSection(Section):
    num_simulations: int = Field(settings.NUM_SIMULATIONS, gt=0)
    ucb_constant: Optional[float] = Field(
        None, gt=0, description="Defaults to the domain's reward span"
    )
    rollout_depth: int = Field(settings.ROLLOUT_DEPTH, gt=0)


class BeliefSection(Section):
    num_particles: int = Field(settings.NUM_PARTICLES, gt=0)
    update: BeliefUpdateEnum = BeliefUpdateEnum.IMPORTANCE
    resampling: ResamplingEnum = ResamplingEnum(settings.RESAMPLING)
    rejection_max_attempts: int = Field(settings.REJECTION_MAX_ATTEMPTS, gt=0)


class ReinvigorationSection(Section):
    threshold: float = settings.REINVIGORATION_THRESHOLD
    burn_in: int = Field(settings.GIBBS_BURN_IN, ge=0)
    mh_steps: int = Field(settings.GIBBS_MH_STEPS, ge=0)
    seed_from: SeedSourceEnum = SeedSourceEnum.BELIEF
    replace_fraction: float = Field(1.0, gt=0, le=1)


class RunSection(Section):
    num_runs: int = Field(settings.NUM_RUNS, gt=0)
    num_episodes: int = Field(settings.NUM_EPISODES, gt=0)
    seed: int = Field(0, ge=0)
    workers: int = Field(settings.NUM_WORKERS, gt=0)
    record_timing: bool = True
    smoothing_window: int = Field(settings.SMOOTHING_WINDOW, gt=0)
    agents: List[AgentEnum] = Field(default_factory=lambda: list(AgentEnum))

    @field_validator("agents", mode="before")
    @classmethod
    def split_agents(cls, value):
        if isinstance(value, str):
            return [v.strip() for v in value.split(",") if v.strip()]
        return value


class AgentProfile(Section):
    """
    The only settings in which the compared agents may differ.
    """

    model_class: ModelClassEnum
    structure_prior: StructurePriorEnum = StructurePriorEnum.UNIFORM
    reinvigorate: bool = False

    @model_validator(mode="after")
    def reinvigorate_needs_structure(self):
        if self.reinvigorate and self.model_class != ModelClassEnum.FACTORED:
            raise ValueError("Reinvigoration only applies to the factored model class")
        return self


DEFAULT_PROFILES: Dict[AgentEnum, AgentProfile] = {
    AgentEnum.BAPOMCP: AgentProfile(model_class=ModelClassEnum.TABULAR),
    AgentEnum.KNOWS_STRUCTURE: AgentProfile(
        model_class=ModelClassEnum.FACTORED, structure_prior=StructurePriorEnum.KNOWN
    ),
    AgentEnum.NO_REINVIGORATION: AgentProfile(model_class=ModelClassEnum.FACTORED),
    AgentEnum.FBAPOMCP_FULL: AgentProfile(model_class=ModelClassEnum.FACTORED, reinvigorate=True),
}


class ExperimentConfig(Section):
    domain: DomainEnum = DomainEnum.TIGER
    discount: float = Field(settings.DISCOUNT, gt=0, lt=1)
    horizon: int = Field(settings.HORIZON, gt=0)
    tiger: TigerSection = TigerSection()
    collision: CollisionSection = CollisionSection()
    grid: GridSection = GridSection()
    planner: PlannerSection = PlannerSection()
    belief: BeliefSection = BeliefSection()
    reinvigoration: ReinvigorationSection = ReinvigorationSection()
    experiment: RunSection = RunSection()
    agents: Dict[AgentEnum, AgentProfile] = Field(default_factory=lambda: dict(DEFAULT_PROFILES))

    def domain_params(self) -> dict:
        params = {"discount": self.discount, "horizon": self.horizon}
        if self.domain == DomainEnum.TIGER:
            params["n_dummy"] = self.tiger.n_dummy
        elif self.domain == DomainEnum.COLLISION:
            params.update(width=self.collision.width, height=self.collision.height)
        else:
            params.update(size=self.grid.size, goal_candidates=self.grid.goals, traps=self.grid.traps)
        return params

    def profile(self, agent: AgentEnum) -> AgentProfile:
        return self.agents.get(agent, DEFAULT_PROFILES[agent])


class EpisodeRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    run: int
    episode: int
    episode_return: float = Field(..., alias="return")
    ms: float
    reinvigorated: bool
    topo_count: int
