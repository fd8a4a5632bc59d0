"""Service configuration: a flat `key = value` file, '#' comments allowed.

Recognized keys (all paths relative to the config file's directory):

    host = 127.0.0.1
    port = 8000
    data_dir = var/sessions          # write-ahead logs + exports
    base.<topic> = bases/veg.json    # argument base per topic
    index.<topic> = idx/veg.json     # optional prebuilt index (else built)
    gate_model = models/gate.json    # optional; zero gate when absent
    free_model_corpus = logs.jsonl   # optional; trains the free unigram model
    important_terms = terms.txt      # optional; one preprocessed term per line
    gold_ids = gold.txt              # optional; one argument id per line
    hedges = hedges.txt              # optional; package defaults when absent
    question_templates = q.txt       # optional
    chitchat_templates = cc.txt      # optional
    stopwords = stop.txt             # optional
    duration.<mode> = 900,1200       # seconds, min,max

The OUMWOZ_CONFIG environment variable overrides the config path.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MalformedInput
from .session import DEFAULT_DURATION_BOUNDS

ENV_VAR = "OUMWOZ_CONFIG"


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: Path = Path("oumwoz-data")
    bases: dict[str, Path] = field(default_factory=dict)
    indexes: dict[str, Path] = field(default_factory=dict)
    gate_model: Path | None = None
    free_model_corpus: Path | None = None
    important_terms: Path | None = None
    gold_ids: Path | None = None
    hedges: Path | None = None
    question_templates: Path | None = None
    chitchat_templates: Path | None = None
    stopwords: Path | None = None
    duration_bounds: dict[str, tuple[int, int]] = field(
        default_factory=lambda: dict(DEFAULT_DURATION_BOUNDS)
    )


def parse_config_text(text: str, base_dir: Path) -> ServiceConfig:
    config = ServiceConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise MalformedInput("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not value:
            raise MalformedInput(f"empty value for {key!r}", line=lineno)
        path = base_dir / value
        if key == "host":
            config.host = value
        elif key == "port":
            config.port = int(value)
        elif key == "data_dir":
            config.data_dir = path
        elif key.startswith("base."):
            config.bases[key[5:]] = path
        elif key.startswith("index."):
            config.indexes[key[6:]] = path
        elif key.startswith("duration."):
            mode = key[9:]
            parts = value.split(",")
            if len(parts) != 2:
                raise MalformedInput(f"duration.{mode} needs 'min,max'", line=lineno)
            config.duration_bounds[mode] = (int(parts[0]), int(parts[1]))
        elif key in (
            "gate_model",
            "free_model_corpus",
            "important_terms",
            "gold_ids",
            "hedges",
            "question_templates",
            "chitchat_templates",
            "stopwords",
        ):
            setattr(config, key, path)
        else:
            raise MalformedInput(f"unknown config key {key!r}", line=lineno)
    return config


def load_config(path: str | os.PathLike | None = None) -> ServiceConfig:
    """Read the config file; OUMWOZ_CONFIG wins over the argument."""
    env_path = os.environ.get(ENV_VAR)
    final = Path(env_path) if env_path else Path(path) if path else None
    if final is None:
        raise MalformedInput("no config path given and OUMWOZ_CONFIG is unset")
    return parse_config_text(final.read_text("utf-8"), final.parent)
