from pydantic import BaseModel, ConfigDict, Field

from fbapomcp.config import settings


class PlannerConfig(BaseModel):
    """
    Monte-Carlo tree search parameters shared by every agent of an experiment.
    """

    model_config = ConfigDict(frozen=True)

    num_simulations: int = Field(
        settings.NUM_SIMULATIONS, gt=0, description="Simulations per decision"
    )
    ucb_constant: float = Field(..., gt=0, description="UCB exploration constant u")
    rollout_depth: int = Field(
        settings.ROLLOUT_DEPTH, gt=0, description="Depth cap of the whole simulation"
    )
    discount: float = Field(settings.DISCOUNT, gt=0, lt=1, description="Discount gamma")
    horizon: int = Field(settings.HORIZON, gt=0, description="Steps left in the episode")

    @property
    def max_depth(self) -> int:
        return min(self.horizon, self.rollout_depth)

    def with_horizon(self, horizon: int) -> "PlannerConfig":
        return self.model_copy(update={"horizon": horizon})
