"""Registry routing rules, mock backends, and the training configuration."""

import dataclasses

import pytest
import yaml

from mtstack.gateway import (
    ConfigError,
    NoWorkerError,
    SUPPORTED_PAIRS,
    TrainingConfig,
    UnknownWorkerError,
    UnsupportedPairError,
    WorkerRegistry,
    emit_training_config,
    is_supported_pair,
    make_training_config,
    mock_backend,
    parse_training_config,
)


class FakeClock:
    def __init__(self):
        self.now = 1000.0

    def __call__(self):
        return self.now

    def advance(self, seconds):
        self.now += seconds


def make_registry(timeout=15.0):
    clock = FakeClock()
    return WorkerRegistry(heartbeat_timeout=timeout, clock=clock), clock


def test_supported_pairs_are_the_eight_english_pairs():
    assert len(SUPPORTED_PAIRS) == 8
    for source, target in SUPPORTED_PAIRS:
        assert source != target
        assert "en" in (source, target)
    assert is_supported_pair("de", "en")
    assert not is_supported_pair("fr", "de")
    assert not is_supported_pair("en", "en")


def test_register_and_route_single_worker():
    registry, _ = make_registry()
    worker = registry.register("de", "en", "http://w1")
    assert registry.route("de", "en").worker_id == worker.worker_id


def test_register_rejects_unknown_pair():
    registry, _ = make_registry()
    with pytest.raises(UnsupportedPairError):
        registry.register("fr", "de", "http://w1")
    with pytest.raises(UnsupportedPairError):
        registry.route("fr", "de")


def test_two_workers_both_present():
    registry, _ = make_registry()
    registry.register("en", "fr", "http://w1")
    registry.register("en", "fr", "http://w2")
    assert len(registry.workers_for("en", "fr")) == 2


def test_route_prefers_least_in_flight():
    registry, _ = make_registry()
    first = registry.register("en", "it", "http://w1")
    second = registry.register("en", "it", "http://w2")
    first.in_flight = 3
    second.in_flight = 1
    assert registry.route("en", "it").worker_id == second.worker_id


def test_route_ties_break_by_registration_order():
    registry, _ = make_registry()
    first = registry.register("en", "es", "http://w1")
    registry.register("en", "es", "http://w2")
    assert registry.route("en", "es").worker_id == first.worker_id


def test_heartbeat_silence_marks_unhealthy():
    registry, clock = make_registry(timeout=15.0)
    worker = registry.register("es", "en", "http://w1")
    assert registry.route("es", "en").worker_id == worker.worker_id
    clock.advance(15.1)
    with pytest.raises(NoWorkerError):
        registry.route("es", "en")
    registry.heartbeat(worker.worker_id)
    assert registry.route("es", "en").worker_id == worker.worker_id


def test_unknown_heartbeat_raises():
    registry, _ = make_registry()
    with pytest.raises(UnknownWorkerError):
        registry.heartbeat("ghost")


def test_reregistration_keeps_order_and_updates_endpoint():
    registry, _ = make_registry()
    worker = registry.register("fr", "en", "http://old", worker_id="w-fr")
    registry.register("fr", "en", "http://w2")
    refreshed = registry.register("fr", "en", "http://new", worker_id="w-fr")
    assert refreshed.registration_index == worker.registration_index
    assert refreshed.endpoint == "http://new"
    assert registry.route("fr", "en").worker_id == "w-fr"


def test_acquire_release_floor():
    registry, _ = make_registry()
    worker = registry.register("en", "de", "http://w1")
    registry.release(worker.worker_id)
    assert worker.in_flight == 0
    registry.acquire(worker.worker_id)
    registry.acquire(worker.worker_id)
    registry.release(worker.worker_id)
    assert worker.in_flight == 1


def test_snapshot_rows():
    registry, clock = make_registry(timeout=10.0)
    registry.register("en", "fr", "http://w1", worker_id="wA")
    clock.advance(11.0)
    registry.register("fr", "en", "http://w2", worker_id="wB")
    rows = registry.snapshot()
    assert [r["worker_id"] for r in rows] == ["wA", "wB"]
    assert rows[0]["status"] == "unhealthy"
    assert rows[1]["status"] == "healthy"
    assert rows[0]["pair"] == "en-fr"


def test_identity_backend():
    backend = mock_backend("identity")
    lines = ["a b c", "x"]
    assert backend.translate(lines, ("en", "fr")) == lines


def test_token_reverse_backend():
    backend = mock_backend("token_reverse")
    assert backend.translate(["a b c"], ("en", "fr")) == ["c b a"]
    out = backend.translate(["a ⟦URL-1⟧ c"], ("en", "fr"))
    assert out == ["c ⟦URL-1⟧ a"]


def test_lexicon_backend():
    backend = mock_backend("lexicon", {"hund": "dog"})
    assert backend.translate(["der hund"], ("de", "en")) == ["der dog"]
    out = backend.translate(["⟦DNT-1⟧ hund"], ("de", "en"))
    assert out == ["⟦DNT-1⟧ dog"]


def test_mock_backend_validation():
    with pytest.raises(ValueError):
        mock_backend("lexicon")
    with pytest.raises(ValueError):
        mock_backend("markov")


def test_training_defaults():
    config = TrainingConfig()
    assert config.enc_layers == 6
    assert config.dec_layers == 6
    assert config.dropout == 0.1
    assert config.optimizer == "adam"
    assert config.learning_rate == 0.0003
    assert config.warmup is True
    assert config.mini_batch == 64
    assert config.beam_size == 12
    assert config.bpe_merges == 32000
    assert config.tied_embeddings is True
    assert config.validation_metrics == ("cross-entropy", "perplexity", "BLEU")
    assert config.early_stopping == "cross-entropy"
    assert config.model_selection == "BLEU"


def test_emitted_document_carries_every_default():
    document = emit_training_config(("en", "de"))
    data = yaml.safe_load(document)
    assert data["language_pair"] == "en-de"
    defaults = TrainingConfig().as_dict()
    for name, value in defaults.items():
        assert data[name] == value


def test_override_changes_only_named_field():
    config = make_training_config({"beam_size": 5})
    base = dataclasses.asdict(TrainingConfig())
    changed = dataclasses.asdict(config)
    assert changed.pop("beam_size") == 5
    base.pop("beam_size")
    assert changed == base


def test_unknown_override_rejected():
    with pytest.raises(ConfigError):
        make_training_config({"beam_width": 5})


def test_emit_parse_emit_fixpoint():
    first = emit_training_config(("fr", "en"), {"dropout": 0.3})
    pair, config = parse_training_config(first)
    assert pair == ("fr", "en")
    assert config.dropout == 0.3
    second = emit_training_config(pair, {
        name: value
        for name, value in dataclasses.asdict(config).items()
    })
    assert second == first
