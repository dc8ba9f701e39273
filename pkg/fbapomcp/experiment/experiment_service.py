import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Dict, List

import pandas as pd
from tqdm import tqdm

from fbapomcp.common.exceptions import FbaPomcpError
from fbapomcp.common.sampling_utils import stream_generator
from fbapomcp.config import settings
from fbapomcp.domains import DomainFactory
from fbapomcp.experiment.agent_service import BayesAgent
from fbapomcp.experiment.experiment_model import CSV_COLUMNS, AgentEnum
from fbapomcp.experiment.experiment_schema import EpisodeRecord, ExperimentConfig
from fbapomcp.experiment.summary_service import plot_learning_curves, summarize
from fbapomcp.pomdp.episode_service import run_episode


ENV_STREAM = 0


def run_single(config: ExperimentConfig, agent_id: AgentEnum, run_index: int) -> List[EpisodeRecord]:
    """
    One independent run: a fresh agent plays ``num_episodes`` episodes and
    keeps its belief between them.

    Module-level so worker processes can receive it; each worker rebuilds the
    domain from the config.
    """
    domain, prior = DomainFactory.create(config.domain, **config.domain_params())
    seed = config.experiment.seed
    env_rng = stream_generator(seed, run_index, ENV_STREAM)
    agent_rng = stream_generator(seed, run_index, 1 + list(AgentEnum).index(agent_id))
    agent = BayesAgent(domain, prior, config.profile(agent_id), config, agent_rng)

    records = []
    for episode in range(config.experiment.num_episodes):
        started = time.perf_counter()
        episode_return, _ = run_episode(domain, agent, domain.horizon, env_rng)
        elapsed = (time.perf_counter() - started) * 1000 if config.experiment.record_timing else 0.0
        records.append(
            EpisodeRecord(
                run=run_index,
                episode=episode,
                episode_return=episode_return,
                ms=round(elapsed, 3),
                reinvigorated=agent.reinvigorated,
                topo_count=agent.topology_count,
            )
        )
    logging.info(
        f"[Experiment Service] [Run] {agent_id.value} run {run_index}: "
        f"mean return {sum(r.episode_return for r in records) / len(records):.3f}"
    )
    return records


def _run_agent(config: ExperimentConfig, agent_id: AgentEnum) -> List[EpisodeRecord]:
    runs = range(config.experiment.num_runs)
    progress = tqdm(
        total=len(runs), desc=agent_id.value, disable=not settings.SHOW_PROGRESS
    )
    records: List[EpisodeRecord] = []
    try:
        if config.experiment.workers > 1:
            with ProcessPoolExecutor(max_workers=config.experiment.workers) as pool:
                futures = [pool.submit(run_single, config, agent_id, r) for r in runs]
                for future in as_completed(futures):
                    records.extend(future.result())
                    progress.update()
        else:
            for r in runs:
                records.extend(run_single(config, agent_id, r))
                progress.update()
    finally:
        progress.close()
    return records


def run_experiment(config: ExperimentConfig, out_dir: str) -> Dict[AgentEnum, pd.DataFrame]:
    """
    Run every configured agent and write ``<agent>.csv``,
    ``<agent>_summary.csv`` and ``learning_curves.svg`` into ``out_dir``.
    """
    os.makedirs(out_dir, exist_ok=True)
    frames: Dict[AgentEnum, pd.DataFrame] = {}
    summaries: Dict[str, pd.DataFrame] = {}
    for agent_id in config.experiment.agents:
        try:
            records = _run_agent(config, agent_id)
        except FbaPomcpError as e:
            logging.error(f"[Experiment Service] [Run] {agent_id.value} failed: {e.message}")
            raise
        frame = (
            pd.DataFrame([r.model_dump(by_alias=True) for r in records], columns=CSV_COLUMNS)
            .sort_values(["run", "episode"])
            .reset_index(drop=True)
        )
        frame.to_csv(os.path.join(out_dir, f"{agent_id.value}.csv"), index=False)
        frames[agent_id] = frame

        if config.experiment.num_runs >= 2:
            summary = summarize(frame, config.experiment.smoothing_window)
            summary.to_csv(os.path.join(out_dir, f"{agent_id.value}_summary.csv"), index=False)
            summaries[agent_id.value] = summary
        else:
            logging.warning(
                f"[Experiment Service] [Summarize] {agent_id.value}: one run, no confidence interval"
            )

    if summaries:
        plot_learning_curves(
            summaries, os.path.join(out_dir, "learning_curves.svg"), title=config.domain.value
        )
    return frames
