"""Serving layer: gateway webserver, pair workers, registry, backends."""

from .app import create_gateway_app, create_worker_app
from .backends import BackendError, EngineBackend, mock_backend
from .config import (
    ConfigError,
    TrainingConfig,
    emit_training_config,
    make_training_config,
    parse_training_config,
)
from .registry import (
    SUPPORTED_PAIRS,
    NoWorkerError,
    UnknownWorkerError,
    UnsupportedPairError,
    WorkerDescriptor,
    WorkerRegistry,
    is_supported_pair,
)

__all__ = [
    "BackendError",
    "ConfigError",
    "EngineBackend",
    "NoWorkerError",
    "SUPPORTED_PAIRS",
    "TrainingConfig",
    "UnknownWorkerError",
    "UnsupportedPairError",
    "WorkerDescriptor",
    "WorkerRegistry",
    "create_gateway_app",
    "create_worker_app",
    "emit_training_config",
    "is_supported_pair",
    "make_training_config",
    "mock_backend",
    "parse_training_config",
]
