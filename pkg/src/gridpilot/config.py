"""Run configuration: defaults, JSON and INI-style config files.

A run is reproducible from its config alone. The INI form mirrors the
JSON schema with one section per group:

    [pilot]
    gamma = 100
    line_width = 5

    [qim]
    delta = 9

    [radon]
    angle_step = 0.5
    tau = 1.5

    [run]
    seed = 0
    jobs = 1
"""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field

from .attacks import AttackSpec
from .errors import ConfigError
from .pilot import PilotConfig
from .pipeline import EstimatorSettings
from .qim import QimParams


@dataclass
class RunConfig:
    gamma: int = 100
    line_width: int = 5
    delta: float = 9.0
    angle_step: float = 0.5
    tau: float = 1.5
    seed: int = 0
    jobs: int = 1
    attack: AttackSpec | None = None

    def pilot(self) -> PilotConfig:
        return PilotConfig(
            gamma=self.gamma,
            line_width=self.line_width,
            qim=QimParams(delta=self.delta),
        )

    def estimator(self) -> EstimatorSettings:
        return EstimatorSettings(angle_step=self.angle_step, tau=self.tau)

    def to_json(self) -> str:
        payload = {
            "pilot": {"gamma": self.gamma, "line_width": self.line_width},
            "qim": {"delta": self.delta},
            "radon": {"angle_step": self.angle_step, "tau": self.tau},
            "run": {"seed": self.seed, "jobs": self.jobs},
        }
        if self.attack is not None:
            payload["attack"] = json.loads(self.attack.to_json())
        return json.dumps(payload, indent=2)


def _from_mapping(cfg: RunConfig, data: dict) -> RunConfig:
    pilot = data.get("pilot", {})
    qim = data.get("qim", {})
    radon = data.get("radon", {})
    run = data.get("run", {})
    try:
        cfg.gamma = int(pilot.get("gamma", cfg.gamma))
        cfg.line_width = int(pilot.get("line_width", cfg.line_width))
        cfg.delta = float(qim.get("delta", cfg.delta))
        cfg.angle_step = float(radon.get("angle_step", cfg.angle_step))
        cfg.tau = float(radon.get("tau", cfg.tau))
        cfg.seed = int(run.get("seed", cfg.seed))
        cfg.jobs = int(run.get("jobs", cfg.jobs))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    if "attack" in data and data["attack"]:
        cfg.attack = AttackSpec.from_json(json.dumps(data["attack"]))
    return cfg


def load_config(path) -> RunConfig:
    """Load a JSON or key=value (INI) config file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    cfg = RunConfig()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON config: {exc}") from exc
        return _from_mapping(cfg, data)
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config file: {exc}") from exc
    data = {section: dict(parser[section]) for section in parser.sections()}
    if "attack" in data and "json" in data["attack"]:
        attack = AttackSpec.from_json(data.pop("attack")["json"])
        cfg = _from_mapping(cfg, data)
        cfg.attack = attack
        return cfg
    return _from_mapping(cfg, data)
