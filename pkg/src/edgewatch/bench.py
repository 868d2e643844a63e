"""Benchmark harness: timed replay, differential runs, and trend sweeps.

``run`` replays a stream file against one engine and reports per-update
latency (averaged over repetitions, optional warmup repetitions discarded),
indexing time, notification and examined-tuple totals, and an approximate
memory footprint obtained by walking the engine's object graph.  The
per-update CSV has one ``update_t,latency_us,notifications`` row per update
plus a trailing ``summary`` row whose numbers are recomputable from the rows
above it.

``diff`` replays the same workload on several engines and compares their
notification logs, normalized to sorted ``(t, query_id, embedding)`` lines;
engines are supposed to be observationally identical, so any divergence is
reported with its first differing line.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import Update, read_stream_file
from .engines import BaseEngine, make_engine
from .planner import Notification
from .queries import QueryGraphPattern, read_query_file


@dataclass
class BenchConfig:
    engine: str
    query_file: str
    stream_file: str
    mode: str = "homomorphism"
    output: Optional[str] = None
    notify_log: Optional[str] = None
    warmup: int = 0
    repetitions: int = 1


@dataclass
class BenchReport:
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

    def summary_line(self) -> str:
        return (
            f"{self.engine} mode={self.mode} queries={self.queries} "
            f"updates={self.updates} mean={self.mean_us:.2f}us "
            f"p50={self.p50_us:.2f}us p99={self.p99_us:.2f}us "
            f"index={self.indexing_us / 1e6:.3f}s notifications={self.notifications} "
            f"examined={self.examined} memory={self.memory_bytes}B"
        )


def percentile(values: Sequence[float], frac: float) -> float:
    """Nearest-rank percentile on a sorted copy."""
    if not values:
        return 0.0
    ordered = sorted(values)
    idx = max(0, math.ceil(frac * len(ordered)) - 1)
    return ordered[min(idx, len(ordered) - 1)]


def replay(
    engine: BaseEngine, updates: Sequence[Update]
) -> tuple[list[float], list[Notification], list[int]]:
    """Apply updates one by one; returns (latencies_us, log, examined deltas)."""
    latencies: list[float] = []
    log: list[Notification] = []
    examined: list[int] = []
    answer = engine.answer_update
    stats = engine.stats
    for u in updates:
        before = stats.examined
        t0 = time.perf_counter_ns()
        notifications = answer(u)
        dt = time.perf_counter_ns() - t0
        latencies.append(dt / 1000.0)
        examined.append(stats.examined - before)
        log.extend(notifications)
    return latencies, log, examined


def notification_lines(log: Sequence[Notification]) -> list[str]:
    """Normalize a log to sorted, one-embedding-per-line TSV."""
    lines = []
    for n in log:
        for emb in n.embeddings:
            lines.append((n.t, n.query_id, emb))
    lines.sort()
    return [
        "\t".join([str(t), qid] + list(emb)) for t, qid, emb in lines
    ]


def index_queries(engine: BaseEngine, queries: Sequence[QueryGraphPattern]) -> float:
    t0 = time.perf_counter_ns()
    for q in queries:
        engine.index_query(q)
    return (time.perf_counter_ns() - t0) / 1000.0


def run(config: BenchConfig) -> BenchReport:
    queries = read_query_file(config.query_file)
    updates = read_stream_file(config.stream_file)
    reps = max(1, config.repetitions)
    warmup = max(0, config.warmup)

    for _ in range(warmup):
        engine = make_engine(config.engine, config.mode)
        index_queries(engine, queries)
        replay(engine, updates)

    all_latencies: list[list[float]] = []
    engine = None
    indexing_us = 0.0
    log: list[Notification] = []
    for _ in range(reps):
        engine = make_engine(config.engine, config.mode)
        indexing_us = index_queries(engine, queries)
        latencies, log, _ = replay(engine, updates)
        all_latencies.append(latencies)

    assert engine is not None
    n = len(updates)
    avg = [
        sum(rep[i] for rep in all_latencies) / reps for i in range(n)
    ]
    notif_per_update: dict[int, int] = {}
    for note in log:
        notif_per_update[note.t] = notif_per_update.get(note.t, 0) + 1

    report = BenchReport(
        engine=config.engine,
        mode=config.mode,
        queries=len(queries),
        updates=n,
        repetitions=reps,
        indexing_us=indexing_us,
        mean_us=sum(avg) / n if n else 0.0,
        p50_us=percentile(avg, 0.50),
        p99_us=percentile(avg, 0.99),
        total_us=sum(avg),
        notifications=len(log),
        embeddings=sum(len(note.embeddings) for note in log),
        examined=engine.stats.examined,
        memory_bytes=estimate_memory(engine),
    )

    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write("update_t,latency_us,notifications\n")
            for i, u in enumerate(updates):
                fh.write(
                    f"{u.t},{avg[i]:.3f},{notif_per_update.get(u.t, 0)}\n"
                )
            fh.write(f"summary,{report.mean_us:.3f},{report.notifications}\n")
    if config.notify_log:
        with open(config.notify_log, "w", encoding="utf-8") as fh:
            for line in notification_lines(log):
                fh.write(line + "\n")
    return report


@dataclass
class DiffResult:
    identical: bool
    engines: list[str]
    counts: dict[str, int]
    divergence: Optional[dict] = None

    def describe(self) -> str:
        if self.identical:
            return (
                f"identical: {len(self.engines)} engines, "
                f"{self.counts[self.engines[0]]} log lines each"
            )
        d = self.divergence or {}
        return (
            f"MISMATCH {d.get('engine')} vs {d.get('baseline')} "
            f"at line {d.get('line')}: "
            f"{d.get('expected')!r} != {d.get('got')!r}"
        )


def diff_logs(named_lines: dict[str, list[str]]) -> DiffResult:
    engines = list(named_lines)
    counts = {name: len(lines) for name, lines in named_lines.items()}
    base_name = engines[0]
    base = named_lines[base_name]
    for name in engines[1:]:
        lines = named_lines[name]
        if lines == base:
            continue
        limit = min(len(lines), len(base))
        at = next(
            (i for i in range(limit) if lines[i] != base[i]), limit
        )
        return DiffResult(
            identical=False,
            engines=engines,
            counts=counts,
            divergence={
                "engine": name,
                "baseline": base_name,
                "line": at,
                "expected": base[at] if at < len(base) else "<missing>",
                "got": lines[at] if at < len(lines) else "<missing>",
            },
        )
    return DiffResult(identical=True, engines=engines, counts=counts)


def diff(
    engine_names: Sequence[str],
    queries: Sequence[QueryGraphPattern],
    updates: Sequence[Update],
    mode: str = "homomorphism",
) -> DiffResult:
    named: dict[str, list[str]] = {}
    for name in engine_names:
        engine = make_engine(name, mode)
        index_queries(engine, queries)
        _, log, _ = replay(engine, updates)
        named[name] = notification_lines(log)
    return diff_logs(named)


def diff_files(
    engine_names: Sequence[str],
    query_file: str,
    stream_file: str,
    mode: str = "homomorphism",
) -> DiffResult:
    return diff(
        engine_names, read_query_file(query_file), read_stream_file(stream_file), mode
    )


def trend(
    base: "WorkloadParams",
    param: str,
    values: Sequence,
    engine_names: Sequence[str],
    mode: str = "homomorphism",
    seeds: Sequence[int] = (),
) -> list[dict]:
    """Sweep one workload parameter; mean latency per engine per value."""
    from dataclasses import replace

    from .workload import gen_queries, gen_stream

    rows: list[dict] = []
    seed_list = list(seeds) or [base.seed]
    for value in values:
        for name in engine_names:
            means = []
            for seed in seed_list:
                params = replace(base, seed=seed, **{param: value})
                queries = gen_queries(params)
                updates, _ = gen_stream(params, queries)
                engine = make_engine(name, mode)
                index_queries(engine, queries)
                latencies, log, _ = replay(engine, updates)
                means.append(sum(latencies) / len(latencies) if latencies else 0.0)
            rows.append(
                {
                    "param": param,
                    "value": value,
                    "engine": name,
                    "mean_us": sum(means) / len(means),
                    "runs": len(seed_list),
                }
            )
    return rows


_ATOMIC = (str, bytes, int, float, bool, complex, type(None))


def estimate_memory(obj) -> int:
    """Approximate bytes held by an object graph via structure walking.

    Counts each reachable container, slot object, and atom once (by id).
    Types, modules, and callables are fenced off so the walk stays inside
    data structures.
    """
    import sys as _sys
    import types as _types

    seen: set[int] = set()
    total = 0
    stack = [obj]
    while stack:
        cur = stack.pop()
        oid = id(cur)
        if oid in seen:
            continue
        seen.add(oid)
        if isinstance(cur, (type, _types.ModuleType, _types.FunctionType,
                            _types.BuiltinFunctionType, _types.MethodType)):
            continue
        try:
            total += _sys.getsizeof(cur)
        except TypeError:
            continue
        if isinstance(cur, _ATOMIC):
            continue
        if isinstance(cur, dict):
            stack.extend(cur.keys())
            stack.extend(cur.values())
        elif isinstance(cur, (list, tuple, set, frozenset)):
            stack.extend(cur)
        else:
            d = getattr(cur, "__dict__", None)
            if d is not None:
                stack.append(d)
            slots = getattr(type(cur), "__slots__", None)
            if slots:
                for name in slots:
                    try:
                        stack.append(getattr(cur, name))
                    except AttributeError:
                        pass
    return total
