from pydantic import BaseModel, ConfigDict, Field

from fbapomcp.config import settings
from fbapomcp.reinvigoration.gibbs_model import SeedSourceEnum


class GibbsConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    burn_in: int = Field(settings.GIBBS_BURN_IN, ge=0, description="Sweeps discarded before emitting")
    mh_steps: int = Field(settings.GIBBS_MH_STEPS, ge=0, description="Structure moves per sweep")
    num_particles: int = Field(settings.NUM_PARTICLES, gt=0, description="Particles emitted")
    threshold: float = Field(
        settings.REINVIGORATION_THRESHOLD,
        description="Reinvigorate once the belief log-likelihood drops below this",
    )
    seed_from: SeedSourceEnum = Field(
        SeedSourceEnum.BELIEF, description="Chain start: best belief particle or a prior draw"
    )
    replace_fraction: float = Field(
        1.0, gt=0, le=1, description="Share of the belief replaced by emitted particles"
    )
