"""Wire schemas for the gateway and worker HTTP endpoints."""

from __future__ import annotations

from pydantic import BaseModel, Field


class TranslationRequest(BaseModel):
    request_id: str | None = None
    text: str
    source_lang: str
    target_lang: str


class StageTimings(BaseModel):
    pipeline_ms: float = Field(ge=0)
    backend_ms: float = Field(ge=0)
    total_ms: float = Field(ge=0)


class TranslationResponse(BaseModel):
    request_id: str
    translated_text: str
    engine_id: str
    timings: StageTimings


class RegisterRequest(BaseModel):
    source_lang: str
    target_lang: str
    endpoint: str
    worker_id: str | None = None


class HeartbeatRequest(BaseModel):
    worker_id: str


class WorkRequest(BaseModel):
    lines: list[str]
    pair: tuple[str, str]


class WorkResponse(BaseModel):
    lines: list[str]
