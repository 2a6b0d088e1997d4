"""The reference training configuration and its document form.

These are the hyperparameters the production transformer systems were
trained with.  They are emitted as a commented YAML document so an
experiment directory carries its exact settings; parsing an emitted
document and emitting it again reproduces the bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import yaml

PROVENANCE_COMMENT = (
    "# Reference training configuration for the crisis-response MT systems.\n"
    "# Values are the deployed defaults; override individual fields per run.\n"
)


class ConfigError(ValueError):
    """An override names a field the configuration does not have."""


@dataclass(frozen=True)
class TrainingConfig:
    enc_layers: int = 6
    dec_layers: int = 6
    dropout: float = 0.1
    optimizer: str = "adam"
    learning_rate: float = 0.0003
    warmup: bool = True
    mini_batch: int = 64
    beam_size: int = 12
    bpe_merges: int = 32000
    tied_embeddings: bool = True
    validation_metrics: tuple[str, ...] = ("cross-entropy", "perplexity", "BLEU")
    early_stopping: str = "cross-entropy"
    model_selection: str = "BLEU"

    def as_dict(self) -> dict:
        out = {}
        for spec in fields(self):
            value = getattr(self, spec.name)
            out[spec.name] = list(value) if isinstance(value, tuple) else value
        return out


def make_training_config(overrides: dict | None = None) -> TrainingConfig:
    """The default configuration with validated field overrides."""
    overrides = dict(overrides or {})
    known = {spec.name for spec in fields(TrainingConfig)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ConfigError(f"unknown training config fields: {', '.join(unknown)}")
    if "validation_metrics" in overrides:
        overrides["validation_metrics"] = tuple(overrides["validation_metrics"])
    return TrainingConfig(**overrides)


def emit_training_config(
    language_pair: tuple[str, str],
    overrides: dict | None = None,
) -> str:
    """Render the configuration document for one language pair."""
    config = make_training_config(overrides)
    body = {"language_pair": f"{language_pair[0]}-{language_pair[1]}"}
    body.update(config.as_dict())
    return PROVENANCE_COMMENT + yaml.safe_dump(body, sort_keys=False)


def parse_training_config(document: str) -> tuple[tuple[str, str], TrainingConfig]:
    """Invert emit_training_config on any emitted document."""
    data = yaml.safe_load(document)
    if not isinstance(data, dict) or "language_pair" not in data:
        raise ConfigError("document does not carry a language_pair field")
    source, _, target = data.pop("language_pair").partition("-")
    return (source, target), make_training_config(data)
