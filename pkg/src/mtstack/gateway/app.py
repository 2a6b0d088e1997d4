"""ASGI applications: the translation gateway and the pair workers.

The gateway owns the text pipeline and the worker registry; workers own
a translation backend.  One /translate request is preprocessed on the
gateway, shipped to the least-loaded healthy worker for its pair as one
/work call, and postprocessed back into a document.
"""

from __future__ import annotations

import time
import uuid
from contextlib import asynccontextmanager
from typing import Mapping

import httpx
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from ..pipeline import PipelineModels, ReinstatementError, postprocess, preprocess
from .backends import EngineBackend
from .models import (
    HeartbeatRequest,
    RegisterRequest,
    StageTimings,
    TranslationRequest,
    TranslationResponse,
    WorkRequest,
    WorkResponse,
)
from .registry import (
    SUPPORTED_PAIRS,
    NoWorkerError,
    UnknownWorkerError,
    UnsupportedPairError,
    WorkerRegistry,
    is_supported_pair,
)

DEFAULT_MAX_TEXT_BYTES = 65536
DEFAULT_BACKEND_TIMEOUT = 30.0

_PAIR_STRINGS = [f"{s}-{t}" for s, t in SUPPORTED_PAIRS]


def _error(status: int, code: str, request_id: str | None = None, **extra) -> JSONResponse:
    body = {"error": code, **extra}
    if request_id is not None:
        body["request_id"] = request_id
    return JSONResponse(body, status_code=status)


def _resolve_models(
    pipeline_models,
    pair: tuple[str, str],
) -> PipelineModels:
    if pipeline_models is None:
        return PipelineModels()
    if isinstance(pipeline_models, Mapping):
        return pipeline_models.get(pair) or PipelineModels()
    return pipeline_models


def create_gateway_app(
    registry: WorkerRegistry | None = None,
    pipeline_models=None,
    *,
    backend_timeout: float = DEFAULT_BACKEND_TIMEOUT,
    max_text_bytes: int = DEFAULT_MAX_TEXT_BYTES,
    http_client: httpx.AsyncClient | None = None,
) -> FastAPI:
    """The webserver app.

    `pipeline_models` is either one PipelineModels shared by every pair
    or a mapping from (source, target) to per-pair models.  `http_client`
    is injectable so tests can mount worker apps in-process.
    """
    if registry is None:
        registry = WorkerRegistry()
    owns_client = http_client is None

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if owns_client:
            app.state.http_client = httpx.AsyncClient()
        try:
            yield
        finally:
            if owns_client:
                await app.state.http_client.aclose()

    app = FastAPI(title="translation gateway", lifespan=lifespan)
    app.state.registry = registry
    if http_client is not None:
        # Injected clients (in-process test transports) are usable before
        # the lifespan runs and are owned by the caller.
        app.state.http_client = http_client

    @app.post("/translate")
    async def translate(request: TranslationRequest):
        started = time.perf_counter()
        request_id = request.request_id or uuid.uuid4().hex
        source, target = request.source_lang, request.target_lang
        if not is_supported_pair(source, target):
            return _error(
                400,
                "unsupported_pair",
                request_id,
                pair=f"{source}-{target}",
                supported_pairs=_PAIR_STRINGS,
            )
        if len(request.text.encode("utf-8")) > max_text_bytes:
            return _error(400, "text_too_large", request_id, max_bytes=max_text_bytes)
        try:
            worker = registry.route(source, target)
        except NoWorkerError:
            return _error(503, "no_worker", request_id, pair=f"{source}-{target}")

        models = _resolve_models(pipeline_models, (source, target))
        pipeline_start = time.perf_counter()
        lines, state = preprocess(request.text, (source, target), models)
        pipeline_ms = (time.perf_counter() - pipeline_start) * 1000

        payload = {"lines": lines, "pair": [source, target]}
        registry.acquire(worker.worker_id)
        backend_start = time.perf_counter()
        try:
            reply = await app.state.http_client.post(
                worker.endpoint.rstrip("/") + "/work",
                json=payload,
                timeout=backend_timeout,
            )
        except httpx.HTTPError as exc:
            return _error(
                502, "backend_failure", request_id, stage="backend", detail=str(exc)
            )
        finally:
            backend_ms = (time.perf_counter() - backend_start) * 1000
            registry.release(worker.worker_id)
        if reply.status_code != 200:
            return _error(
                502,
                "backend_failure",
                request_id,
                stage="backend",
                detail=f"worker returned {reply.status_code}",
            )
        translated = reply.json().get("lines")
        if not isinstance(translated, list) or len(translated) != len(lines):
            return _error(
                502,
                "backend_failure",
                request_id,
                stage="backend",
                detail="worker reply does not match request batch",
            )

        pipeline_start = time.perf_counter()
        try:
            text = postprocess(translated, state, models)
        except ReinstatementError as exc:
            return _error(
                502,
                "postprocess_failure",
                request_id,
                stage="postprocess",
                detail=str(exc),
            )
        pipeline_ms += (time.perf_counter() - pipeline_start) * 1000

        response = TranslationResponse(
            request_id=request_id,
            translated_text=text,
            engine_id=worker.worker_id,
            timings=StageTimings(
                pipeline_ms=pipeline_ms,
                backend_ms=backend_ms,
                total_ms=(time.perf_counter() - started) * 1000,
            ),
        )
        return response

    @app.get("/health")
    async def health():
        return {"workers": registry.snapshot(), "supported_pairs": _PAIR_STRINGS}

    @app.post("/workers/register")
    async def register(body: RegisterRequest):
        try:
            descriptor = registry.register(
                body.source_lang, body.target_lang, body.endpoint, body.worker_id
            )
        except UnsupportedPairError:
            return _error(
                400,
                "unsupported_pair",
                pair=f"{body.source_lang}-{body.target_lang}",
                supported_pairs=_PAIR_STRINGS,
            )
        return {
            "worker_id": descriptor.worker_id,
            "pair": f"{descriptor.language_pair[0]}-{descriptor.language_pair[1]}",
            "endpoint": descriptor.endpoint,
        }

    @app.post("/workers/heartbeat")
    async def heartbeat(body: HeartbeatRequest):
        try:
            status = registry.heartbeat(body.worker_id)
        except UnknownWorkerError:
            return _error(404, "unknown_worker", worker_id=body.worker_id)
        return {"worker_id": body.worker_id, "status": status}

    return app


def create_worker_app(
    source: str,
    target: str,
    backend: EngineBackend,
) -> FastAPI:
    """One pair worker wrapping a translation backend."""
    app = FastAPI(title=f"mt worker {source}-{target}")
    app.state.backend = backend

    @app.post("/work")
    async def work(body: WorkRequest):
        if tuple(body.pair) != (source, target):
            return _error(
                400,
                "wrong_pair",
                pair=f"{body.pair[0]}-{body.pair[1]}",
                serves=f"{source}-{target}",
            )
        try:
            lines = backend.translate(body.lines, (source, target))
        except Exception as exc:
            return _error(500, "backend_failure", detail=str(exc))
        return WorkResponse(lines=lines)

    @app.get("/health")
    async def health():
        return {
            "pair": f"{source}-{target}",
            "backend": getattr(backend, "mode", type(backend).__name__),
        }

    return app
