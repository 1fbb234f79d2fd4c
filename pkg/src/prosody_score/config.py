"""Run configuration: defaults, JSON config file, command-line overrides."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

from . import audio_io, intonation, pitch_tracker, prosody
from .errors import ConfigurationError, InputMissingError
from .scoring.model import DEFAULT_LAMBDA


@dataclass(frozen=True)
class Config:
    vad_frame_s: float = audio_io.DEFAULT_FRAME_S
    vad_hop_s: float = audio_io.DEFAULT_HOP_S
    vad_rms_threshold: float = audio_io.DEFAULT_RMS_THRESHOLD
    pitch_f_min: float = pitch_tracker.DEFAULT_F_MIN
    pitch_f_max: float = pitch_tracker.DEFAULT_F_MAX
    pitch_frame_s: float = pitch_tracker.DEFAULT_FRAME_S
    pitch_hop_s: float = pitch_tracker.DEFAULT_HOP_S
    voicing_threshold: float = pitch_tracker.DEFAULT_VOICING_THRESHOLD
    min_pause_s: float = prosody.DEFAULT_MIN_PAUSE_S
    long_pause_s: float = prosody.DEFAULT_LONG_PAUSE_S
    fillers: tuple[str, ...] = field(default_factory=lambda: tuple(sorted(prosody.default_fillers())))
    min_points: int = intonation.DEFAULT_MIN_POINTS
    pitch_scale: str = "hz"
    ridge_lambda: float = DEFAULT_LAMBDA
    seed: int = 0
    word_time_tolerance_s: float = 0.01

    def to_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **overrides) -> "Config":
        values = {k: v for k, v in overrides.items() if v is not None}
        return _validated(replace(self, **values))


def _validated(cfg: Config) -> Config:
    if cfg.min_pause_s <= 0:
        raise ConfigurationError("min_pause_s must be positive")
    if cfg.long_pause_s < cfg.min_pause_s:
        raise ConfigurationError("long_pause_s must be >= min_pause_s")
    if cfg.pitch_scale not in intonation.SCALES:
        raise ConfigurationError(f"pitch_scale must be one of {intonation.SCALES}")
    if cfg.min_points < 2:
        raise ConfigurationError("min_points must be >= 2")
    if cfg.ridge_lambda < 0:
        raise ConfigurationError("ridge_lambda must be >= 0")
    return cfg


CONFIG_KEYS = tuple(f.name for f in fields(Config))


def load_config(path=None) -> Config:
    """Defaults, updated by the keys of a JSON object file when ``path`` is given."""
    if path is None:
        return Config()
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise InputMissingError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: config must be a JSON object")
    unknown = sorted(set(doc) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigurationError(f"{path}: unknown config keys {unknown}")
    if "fillers" in doc:
        doc["fillers"] = tuple(sorted(prosody.load_filler_lexicon_text("\n".join(doc["fillers"]))))
    try:
        return _validated(Config(**doc))
    except TypeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
