import logging
import os
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from fbapomcp.common.exceptions import ConfigError, InvalidArgumentError
from fbapomcp.domains import DomainFactory
from fbapomcp.experiment.experiment_model import AGENT_FIELDS, AgentEnum
from fbapomcp.experiment.experiment_schema import DEFAULT_PROFILES, ExperimentConfig


def _nest(flat: Mapping[str, Any]) -> Dict[str, Any]:
    """
    ``{"planner.num_simulations": "64"}`` -> ``{"planner": {"num_simulations": "64"}}``
    """
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        if value is None:
            raise ConfigError(f"Key '{key}' has no value")
        *sections, leaf = key.strip().split(".")
        node = nested
        for section in sections:
            child = node.setdefault(section, {})
            if not isinstance(child, dict):
                raise ConfigError(f"Key '{key}' clashes with the scalar '{section}'")
            node = child
        if isinstance(node.get(leaf), dict):
            raise ConfigError(f"Key '{key}' clashes with the section '{leaf}'")
        node[leaf] = value
    return nested


def _merge_agent_blocks(blocks: Dict[str, Any]) -> Dict[str, Any]:
    profiles: Dict[str, Any] = {}
    for agent_id, fields in blocks.items():
        try:
            agent = AgentEnum(agent_id)
        except ValueError:
            raise ConfigError(f"Unknown agent id '{agent_id}'")
        if not isinstance(fields, dict):
            raise ConfigError(f"'agents.{agent_id}' must be a block of fields")
        forbidden = set(fields) - AGENT_FIELDS
        if forbidden:
            raise ConfigError(
                f"agents.{agent_id} may only set {sorted(AGENT_FIELDS)}, got {sorted(forbidden)}"
            )
        profiles[agent.value] = {**DEFAULT_PROFILES[agent].model_dump(mode="json"), **fields}
    return {
        **{a.value: p.model_dump(mode="json") for a, p in DEFAULT_PROFILES.items()},
        **profiles,
    }


def load_experiment_config(
    path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None
) -> ExperimentConfig:
    """
    Read a flat ``section.key = value`` file, apply dotted-key ``overrides`` on
    top and validate the result, including the domain parameters.
    """
    flat: Dict[str, Any] = {}
    if path is not None:
        if not os.path.isfile(path):
            raise ConfigError(f"Config file not found: {path}")
        flat.update(dotenv_values(path))
    flat.update({k: v for k, v in (overrides or {}).items() if v is not None})

    raw = _nest(flat)
    if "agents" in raw:
        if not isinstance(raw["agents"], dict):
            raise ConfigError("'agents' must be a block of per-agent fields")
        raw["agents"] = _merge_agent_blocks(raw["agents"])

    try:
        config = ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        logging.error(f"[Config Loader] [Load] {path}: {e.error_count()} invalid field(s)")
        raise ConfigError(str(e))
    try:
        DomainFactory.create(config.domain, **config.domain_params())
    except InvalidArgumentError as e:
        logging.error(
            f"[Config Loader] [Load] {path}: invalid {config.domain.value} parameters: {e.message}"
        )
        raise ConfigError(e.message)
    logging.info(
        f"[Config Loader] [Load] domain={config.domain.value}, "
        f"agents={[a.value for a in config.experiment.agents]}, "
        f"runs={config.experiment.num_runs}, episodes={config.experiment.num_episodes}"
    )
    return config
