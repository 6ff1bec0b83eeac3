"""Declarative pipeline configuration (YAML with environment interpolation)."""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import yaml

from .chat import ChatConfig
from .filtering import NliConfig

_ENV_RE = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")

DEFAULT_ENTRY_SAMPLE_SIZE = 30_000


class ConfigError(Exception):
    pass


def _interpolate(value):
    if isinstance(value, str):
        def sub(match: re.Match) -> str:
            name = match.group(1)
            if name not in os.environ:
                raise ConfigError(f"environment variable {name} is not set")
            return os.environ[name]
        return _ENV_RE.sub(sub, value)
    if isinstance(value, dict):
        return {k: _interpolate(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_interpolate(v) for v in value]
    return value


@dataclass
class PipelineConfig:
    languages: list[str]
    dumps: dict[str, str]
    output_dir: str
    chat: ChatConfig
    nli: Optional[NliConfig] = None
    entry_sample_size: int = DEFAULT_ENTRY_SAMPLE_SIZE
    seed: int = 0
    enable_nli: bool = True
    drop_over_length: bool = False
    prompt_version: str = "v1"

    def __post_init__(self) -> None:
        if self.entry_sample_size <= 0:
            raise ConfigError("entry_sample_size must be positive")
        for language in self.languages:
            if language not in self.dumps:
                raise ConfigError(f"language {language!r} has no dump path configured")
        if self.enable_nli and self.nli is None:
            raise ConfigError("enable_nli is set but no NLI endpoint is configured")

    def fingerprint(self) -> str:
        """Stable hash over every config field; any change invalidates checkpoints."""
        payload = {
            "languages": self.languages,
            "dumps": self.dumps,
            "output_dir": self.output_dir,
            "entry_sample_size": self.entry_sample_size,
            "seed": self.seed,
            "enable_nli": self.enable_nli,
            "drop_over_length": self.drop_over_length,
            "prompt_version": self.prompt_version,
            "chat": vars(self.chat),
            "nli": vars(self.nli) if self.nli else None,
        }
        canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(path: Union[str, Path], seed_override: Optional[int] = None) -> PipelineConfig:
    """Load a YAML config file, interpolating ${ENV_VAR} references.

    CHAT_BASE_URL, CHAT_API_KEY and NLI_BASE_URL are read from the
    environment when not given in the file.
    """
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    if not isinstance(raw, dict):
        raise ConfigError("config file must contain a mapping")
    raw = _interpolate(raw)

    chat_section = dict(raw.get("chat") or {})
    chat_section.setdefault("base_url", os.environ.get("CHAT_BASE_URL", ""))
    chat_section.setdefault("api_key", os.environ.get("CHAT_API_KEY", ""))
    if not chat_section["base_url"]:
        raise ConfigError("chat.base_url missing (set it in the config or CHAT_BASE_URL)")
    try:
        chat = ChatConfig(**chat_section)
    except TypeError as exc:
        raise ConfigError(f"bad chat section: {exc}") from exc

    nli = None
    nli_section = dict(raw.get("nli") or {})
    nli_section.setdefault("base_url", os.environ.get("NLI_BASE_URL", ""))
    if nli_section.get("base_url"):
        try:
            nli = NliConfig(**nli_section)
        except TypeError as exc:
            raise ConfigError(f"bad nli section: {exc}") from exc

    filter_section = raw.get("filter") or {}
    try:
        config = PipelineConfig(
            languages=list(raw.get("languages") or []),
            dumps=dict(raw.get("dumps") or {}),
            output_dir=str(raw.get("output_dir") or "out"),
            chat=chat,
            nli=nli,
            entry_sample_size=int(raw.get("entry_sample_size", DEFAULT_ENTRY_SAMPLE_SIZE)),
            seed=int(seed_override if seed_override is not None else raw.get("seed", 0)),
            enable_nli=bool(filter_section.get("enable_nli", nli is not None)),
            drop_over_length=bool(filter_section.get("drop_over_length", False)),
            prompt_version=str(raw.get("prompt_version", "v1")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    return config
