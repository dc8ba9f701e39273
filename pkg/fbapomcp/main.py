import logging
import os
import sys
import traceback

import click

from fbapomcp.common.exceptions import ConfigError
from fbapomcp.config import settings
from fbapomcp.experiment.config_loader import load_experiment_config
from fbapomcp.experiment.experiment_service import run_experiment


EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3


def setup_logging(out_dir: str):
    log_dir = os.path.join(out_dir, settings.LOG_DIR)
    if not os.path.exists(log_dir):
        os.makedirs(log_dir)

    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        force=True,
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler(os.path.join(log_dir, "fbapomcp.log")),
        ],
    )


@click.group()
def cli():
    """Bayes-adaptive POMCP experiments."""


@cli.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="key = value experiment file")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, default=None)
@click.option("--runs", type=int, default=None)
@click.option("--episodes", type=int, default=None)
@click.option("--agent", "agents", default=None, help="Comma-separated agent ids")
def run(config_path, out_dir, seed, runs, episodes, agents):
    """Run the configured agents and write CSVs and learning curves."""
    setup_logging(out_dir)
    overrides = {
        "experiment.seed": seed,
        "experiment.num_runs": runs,
        "experiment.num_episodes": episodes,
        "experiment.agents": agents,
    }
    try:
        config = load_experiment_config(config_path, overrides)
    except ConfigError as e:
        logging.error(f"[Main] [Run] configuration error: {e.message}")
        sys.exit(EXIT_CONFIG_ERROR)

    try:
        run_experiment(config, out_dir)
    except Exception as e:
        logging.error(f"[Main] [Run] experiment failed: {e}\n{traceback.format_exc()}")
        sys.exit(EXIT_RUNTIME_ERROR)
    logging.info(f"[Main] [Run] results written to {out_dir}")


if __name__ == "__main__":
    cli()
