"""Run configuration shared by the CLI and the toy diffusion pipeline.

The on-disk format is a flat TOML-compatible ``key = value`` file; every
key has a default here, and command-line flags override file values.
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .diffusion import EdmParams, GuidanceWeights, Schedule
from .toy import CfgDropRates


@dataclass(frozen=True)
class RunConfig:
    keyframe_count: int = 14
    spacing: int = 12
    sigma_data: float = 0.5
    w_aud: float = 5.0
    w_id: float = 2.0
    audio_drop_rate: float = 0.2
    identity_drop_rate: float = 0.1
    lambda_2: float = 1.0
    steps: int = 500
    inference_steps: int = 10
    seed: int = 7
    channels: int = 2
    height: int = 8
    width: int = 8
    n_clips: int = 8
    hidden: int = 64
    learning_rate: float = 0.01

    def schedule(self) -> Schedule:
        return Schedule(keyframe_count=self.keyframe_count, spacing=self.spacing)

    def edm(self) -> EdmParams:
        return EdmParams(sigma_data=self.sigma_data)

    def guidance(self) -> GuidanceWeights:
        return GuidanceWeights(w_aud=self.w_aud, w_id=self.w_id)

    def drop_rates(self) -> CfgDropRates:
        return CfgDropRates(audio=self.audio_drop_rate, identity=self.identity_drop_rate)


def load_config(path: str | Path) -> RunConfig:
    """Parse a flat key = value config file; unknown keys are rejected."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    known = {f.name: f.type for f in fields(RunConfig)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {', '.join(unknown)}")
    coerced = {}
    for key, value in raw.items():
        default = getattr(RunConfig(), key)
        if isinstance(default, bool):
            coerced[key] = bool(value)
        elif isinstance(default, int):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(f"{path}: {key} must be an integer, got {value}")
            coerced[key] = int(value)
        else:
            coerced[key] = float(value)
    return RunConfig(**coerced)


def dump_config(config: RunConfig) -> str:
    lines = [f"{key} = {value}" for key, value in asdict(config).items()]
    return "\n".join(lines) + "\n"


def apply_overrides(config: RunConfig, **overrides) -> RunConfig:
    """Replace config fields with any non-None override values."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **updates) if updates else config
