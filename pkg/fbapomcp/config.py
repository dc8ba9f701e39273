import math
import os

from dotenv import load_dotenv
from pydantic_settings import BaseSettings


load_dotenv()


class Settings(BaseSettings):
    # Logging
    LOG_LEVEL: str = os.getenv("FBAPOMCP_LOG_LEVEL", "INFO")
    LOG_DIR: str = os.getenv("FBAPOMCP_LOG_DIR", "logs")

    # Domain defaults
    DISCOUNT: float = float(os.getenv("FBAPOMCP_DISCOUNT", "") or "0.95")
    HORIZON: int = int(os.getenv("FBAPOMCP_HORIZON", "") or "30")

    # Planner
    NUM_SIMULATIONS: int = int(os.getenv("FBAPOMCP_NUM_SIMULATIONS", "") or "4096")
    ROLLOUT_DEPTH: int = int(os.getenv("FBAPOMCP_ROLLOUT_DEPTH", "") or "30")

    # Belief
    NUM_PARTICLES: int = int(os.getenv("FBAPOMCP_NUM_PARTICLES", "") or "100")
    RESAMPLING: str = os.getenv("FBAPOMCP_RESAMPLING", "systematic")
    REJECTION_MAX_ATTEMPTS: int = int(
        os.getenv("FBAPOMCP_REJECTION_MAX_ATTEMPTS", "") or "1000"
    )

    # Reinvigoration
    REINVIGORATION_THRESHOLD: float = float(
        os.getenv("FBAPOMCP_REINVIGORATION_THRESHOLD", "") or str(-10 * math.log(10))
    )
    GIBBS_BURN_IN: int = int(os.getenv("FBAPOMCP_GIBBS_BURN_IN", "") or "50")
    GIBBS_MH_STEPS: int = int(os.getenv("FBAPOMCP_GIBBS_MH_STEPS", "") or "1")

    # Experiments
    NUM_EPISODES: int = int(os.getenv("FBAPOMCP_NUM_EPISODES", "") or "500")
    NUM_RUNS: int = int(os.getenv("FBAPOMCP_NUM_RUNS", "") or "10")
    NUM_WORKERS: int = int(os.getenv("FBAPOMCP_NUM_WORKERS", "") or "1")
    SMOOTHING_WINDOW: int = int(os.getenv("FBAPOMCP_SMOOTHING_WINDOW", "") or "1")
    SHOW_PROGRESS: bool = os.getenv("FBAPOMCP_SHOW_PROGRESS", "true").lower() == "true"

    class Config:
        env_file = ".env"
        extra = "ignore"  # Ignore extra fields instead of raising validation errors


settings = Settings()
