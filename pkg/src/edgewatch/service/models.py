"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class SessionCreateRequest(BaseModel):
    engine: str = "tric"
    mode: str = "homomorphism"


class SessionInfo(BaseModel):
    session_id: str
    engine: str
    mode: str
    queries: int = 0
    updates: int = 0


class QueriesRequest(BaseModel):
    """Query blocks in the standard text format."""

    text: str


class QueriesAccepted(BaseModel):
    session_id: str
    query_ids: list[str]


class UpdateLines(BaseModel):
    """Stream update lines (tab-separated), timestamps assigned in order."""

    lines: list[str]


class NotificationModel(BaseModel):
    t: int
    query_id: str
    embeddings: list[list[str]]


class UpdatesResponse(BaseModel):
    session_id: str
    applied: int
    duplicates: int
    notifications: list[NotificationModel]


class SessionStats(BaseModel):
    session_id: str
    engine: str
    mode: str
    queries: int
    updates: int
    duplicates: int
    notifications: int
    embeddings: int
    examined: int
    memory_bytes: int


class WorkloadRequest(BaseModel):
    out_dir: str
    num_queries: int
    avg_size: int
    selectivity: float
    overlap: float
    num_edges: int
    label_alphabet_size: int = 100
    seed: int = 0
    vertex_pool_size: Optional[int] = None
    literal_pool_size: Optional[int] = None
    hot_noise_prob: float = 0.25
    measure: bool = False


class WorkloadResponse(BaseModel):
    queries: str
    stream: str
    manifest: str
    planted_queries: int
    planted_edges: int
    achieved_selectivity: Optional[float] = None


class BenchRunRequest(BaseModel):
    engine: str
    query_file: str
    stream_file: str
    mode: str = "homomorphism"
    output: Optional[str] = None
    notify_log: Optional[str] = None
    warmup: int = 0
    repetitions: int = 1


class BenchReportModel(BaseModel):
    engine: str
    mode: str
    queries: int
    updates: int
    repetitions: int
    indexing_us: float
    mean_us: float
    p50_us: float
    p99_us: float
    total_us: float
    notifications: int
    embeddings: int
    examined: int
    memory_bytes: int


class DiffRequest(BaseModel):
    engines: list[str] = Field(min_length=2)
    query_file: str
    stream_file: str
    mode: str = "homomorphism"


class DiffResponse(BaseModel):
    identical: bool
    engines: list[str]
    counts: dict[str, int]
    divergence: Optional[dict] = None
    description: str


class TrendRequest(BaseModel):
    param: str
    values: list[float]
    engines: list[str]
    mode: str = "homomorphism"
    seeds: list[int] = []
    num_queries: int = 100
    avg_size: int = 5
    selectivity: float = 0.25
    overlap: float = 0.35
    num_edges: int = 10000
    label_alphabet_size: int = 100
    seed: int = 0
    vertex_pool_size: Optional[int] = None
    literal_pool_size: Optional[int] = None
    hot_noise_prob: float = 0.25


class TrendRow(BaseModel):
    param: str
    value: float
    engine: str
    mean_us: float
    runs: int


class TrendResponse(BaseModel):
    rows: list[TrendRow]
