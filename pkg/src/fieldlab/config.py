"""Scenario configuration files (JSON or YAML)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .modebasis import PhysicalConstants

DEFAULT_SEED = 20240611
TOP_LEVEL_KEYS = {"scenario", "constants", "params", "seed", "out"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    params: dict = field(default_factory=dict)
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    seed: int = DEFAULT_SEED
    out: str | None = None

    def resolved(self) -> dict:
        """Everything that determines a run, in a JSON-ready form."""
        return {
            "scenario": self.scenario,
            "params": self.params,
            "constants": asdict(self.constants),
            "seed": self.seed,
        }


def read_config_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix in (".yaml", ".yml"):
        import yaml

        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a mapping")
    return data


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


def resolve_config(scenario: str, defaults: dict, data: dict | None = None, seed=None, out=None) -> ScenarioConfig:
    """Merge file data over scenario defaults; unknown keys anywhere are an error."""
    data = dict(data or {})
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if data.get("scenario", scenario) != scenario:
        raise ConfigError(f"config is for scenario {data['scenario']!r}, not {scenario!r}")
    params = dict(defaults)
    given = data.get("params", {}) or {}
    if not isinstance(given, dict):
        raise ConfigError("params must be a mapping")
    bad = set(given) - set(defaults)
    if bad:
        raise ConfigError(f"unknown parameters for {scenario}: {sorted(bad)}")
    params.update(given)
    try:
        constants = PhysicalConstants(**(data.get("constants") or {}))
    except TypeError as exc:
        raise ConfigError(f"bad constants: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    seed = _check_seed(seed if seed is not None else data.get("seed", DEFAULT_SEED))
    return ScenarioConfig(scenario, params, constants, seed, out if out is not None else data.get("out"))
