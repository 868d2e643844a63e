"""FastAPI service wrapping the matching engines and bench harness.

Sessions hold a live engine each: register queries, push updates, read
notifications back.  The workload and bench endpoints run synchronously in
the server process (a bench replay is one request), so CLI-reported timings
are not skewed by per-update HTTP round trips.
"""

from __future__ import annotations

import dataclasses
import threading
import uuid

from fastapi import FastAPI, HTTPException

from ..bench import (
    BenchConfig,
    diff_files,
    estimate_memory,
    run,
    trend,
)
from ..core import StreamFormatError, StreamOrderError, iter_stream_lines
from ..engines import ENGINE_NAMES, BaseEngine, EngineError, make_engine
from ..queries import QueryFormatError, parse_query_file
from ..workload import (
    WorkloadError,
    WorkloadParams,
    gen_queries,
    gen_stream,
    measure_selectivity,
    write_workload,
)
from .models import (
    BenchReportModel,
    BenchRunRequest,
    DiffRequest,
    DiffResponse,
    NotificationModel,
    QueriesAccepted,
    QueriesRequest,
    SessionCreateRequest,
    SessionInfo,
    SessionStats,
    TrendRequest,
    TrendResponse,
    TrendRow,
    UpdateLines,
    UpdatesResponse,
    WorkloadRequest,
    WorkloadResponse,
)


class Session:
    def __init__(self, sid: str, engine_name: str, mode: str):
        self.sid = sid
        self.engine_name = engine_name
        self.mode = mode
        self.engine: BaseEngine = make_engine(engine_name, mode)
        self.query_count = 0
        self.lock = threading.Lock()


def create_app() -> FastAPI:
    app = FastAPI(title="edgewatch", version="0.1.0")
    sessions: dict[str, Session] = {}

    def get_session(sid: str) -> Session:
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(status_code=404, detail=f"no session {sid!r}")
        return s

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "engines": list(ENGINE_NAMES)}

    @app.post("/sessions", response_model=SessionInfo, status_code=201)
    def create_session(req: SessionCreateRequest) -> SessionInfo:
        try:
            s = Session(uuid.uuid4().hex[:12], req.engine, req.mode)
        except EngineError as e:
            raise HTTPException(status_code=400, detail=str(e))
        sessions[s.sid] = s
        return SessionInfo(
            session_id=s.sid, engine=s.engine_name, mode=s.mode, queries=0, updates=0
        )

    @app.get("/sessions/{sid}", response_model=SessionInfo)
    def session_info(sid: str) -> SessionInfo:
        s = get_session(sid)
        return SessionInfo(
            session_id=s.sid,
            engine=s.engine_name,
            mode=s.mode,
            queries=s.query_count,
            updates=s.engine.stats.updates,
        )

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str) -> None:
        get_session(sid)
        del sessions[sid]

    @app.post("/sessions/{sid}/queries", response_model=QueriesAccepted)
    def add_queries(sid: str, req: QueriesRequest) -> QueriesAccepted:
        s = get_session(sid)
        try:
            queries = parse_query_file(req.text)
        except QueryFormatError as e:
            raise HTTPException(status_code=400, detail=str(e))
        with s.lock:
            accepted: list[str] = []
            try:
                for q in queries:
                    s.engine.index_query(q)
                    accepted.append(q.id)
            except EngineError as e:
                raise HTTPException(status_code=409, detail=str(e))
            finally:
                s.query_count += len(accepted)
        return QueriesAccepted(session_id=sid, query_ids=accepted)

    @app.post("/sessions/{sid}/updates", response_model=UpdatesResponse)
    def push_updates(sid: str, req: UpdateLines) -> UpdatesResponse:
        s = get_session(sid)
        with s.lock:
            base_t = s.engine.state.last_t
            notifications = []
            applied = 0
            before_dups = s.engine.stats.duplicates
            try:
                for u in iter_stream_lines(req.lines):
                    shifted = u._replace(t=base_t + u.t)
                    notifications.extend(s.engine.answer_update(shifted))
                    applied += 1
            except (StreamFormatError, StreamOrderError) as e:
                raise HTTPException(status_code=400, detail=str(e))
            dups = s.engine.stats.duplicates - before_dups
        return UpdatesResponse(
            session_id=sid,
            applied=applied,
            duplicates=dups,
            notifications=[
                NotificationModel(
                    t=n.t,
                    query_id=n.query_id,
                    embeddings=sorted(list(e) for e in n.embeddings),
                )
                for n in notifications
            ],
        )

    @app.get("/sessions/{sid}/stats", response_model=SessionStats)
    def session_stats(sid: str) -> SessionStats:
        s = get_session(sid)
        st = s.engine.stats
        return SessionStats(
            session_id=sid,
            engine=s.engine_name,
            mode=s.mode,
            queries=s.query_count,
            updates=st.updates,
            duplicates=st.duplicates,
            notifications=st.notifications,
            embeddings=st.embeddings,
            examined=st.examined,
            memory_bytes=estimate_memory(s.engine),
        )

    @app.post("/workloads/generate", response_model=WorkloadResponse)
    def generate_workload(req: WorkloadRequest) -> WorkloadResponse:
        params = WorkloadParams(
            num_queries=req.num_queries,
            avg_size=req.avg_size,
            selectivity=req.selectivity,
            overlap=req.overlap,
            num_edges=req.num_edges,
            label_alphabet_size=req.label_alphabet_size,
            seed=req.seed,
            vertex_pool_size=req.vertex_pool_size,
            literal_pool_size=req.literal_pool_size,
            hot_noise_prob=req.hot_noise_prob,
        )
        try:
            params.validate()
            paths = write_workload(req.out_dir, params)
        except WorkloadError as e:
            raise HTTPException(status_code=400, detail=str(e))
        except OSError as e:
            raise HTTPException(status_code=400, detail=f"cannot write: {e}")
        achieved = None
        if req.measure:
            queries = gen_queries(params)
            updates, _ = gen_stream(params, queries)
            achieved = measure_selectivity(queries, updates)
        planted = round(params.selectivity * params.num_queries)
        from ..workload import parse_manifest

        with open(paths["manifest"], "r", encoding="utf-8") as fh:
            manifest = parse_manifest(fh.read())
        return WorkloadResponse(
            queries=paths["queries"],
            stream=paths["stream"],
            manifest=paths["manifest"],
            planted_queries=int(manifest.get("planted_queries", planted)),
            planted_edges=int(manifest.get("planted_edges", 0)),
            achieved_selectivity=achieved,
        )

    @app.post("/bench/run", response_model=BenchReportModel)
    def bench_run(req: BenchRunRequest) -> BenchReportModel:
        config = BenchConfig(
            engine=req.engine,
            query_file=req.query_file,
            stream_file=req.stream_file,
            mode=req.mode,
            output=req.output,
            notify_log=req.notify_log,
            warmup=req.warmup,
            repetitions=req.repetitions,
        )
        try:
            report = run(config)
        except (EngineError, QueryFormatError, StreamFormatError, WorkloadError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        except FileNotFoundError as e:
            raise HTTPException(status_code=400, detail=str(e))
        return BenchReportModel(**dataclasses.asdict(report))

    @app.post("/bench/diff", response_model=DiffResponse)
    def bench_diff(req: DiffRequest) -> DiffResponse:
        try:
            result = diff_files(req.engines, req.query_file, req.stream_file, req.mode)
        except (EngineError, QueryFormatError, StreamFormatError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        except FileNotFoundError as e:
            raise HTTPException(status_code=400, detail=str(e))
        return DiffResponse(
            identical=result.identical,
            engines=result.engines,
            counts=result.counts,
            divergence=result.divergence,
            description=result.describe(),
        )

    @app.post("/bench/trend", response_model=TrendResponse)
    def bench_trend(req: TrendRequest) -> TrendResponse:
        base = WorkloadParams(
            num_queries=req.num_queries,
            avg_size=req.avg_size,
            selectivity=req.selectivity,
            overlap=req.overlap,
            num_edges=req.num_edges,
            label_alphabet_size=req.label_alphabet_size,
            seed=req.seed,
            vertex_pool_size=req.vertex_pool_size,
            literal_pool_size=req.literal_pool_size,
            hot_noise_prob=req.hot_noise_prob,
        )
        int_params = {"num_queries", "avg_size", "num_edges", "label_alphabet_size"}
        values = [
            int(v) if req.param in int_params else v for v in req.values
        ]
        try:
            rows = trend(base, req.param, values, req.engines, req.mode, req.seeds)
        except (EngineError, WorkloadError, TypeError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        return TrendResponse(
            rows=[
                TrendRow(
                    param=r["param"],
                    value=float(r["value"]),
                    engine=r["engine"],
                    mean_us=r["mean_us"],
                    runs=r["runs"],
                )
                for r in rows
            ]
        )

    return app


app = create_app()
