"""Bench harness: replay instrumentation, CSV/TSV contracts, diff, trend."""

import csv

import pytest

from edgewatch.bench import (
    BenchConfig,
    DiffResult,
    diff,
    diff_files,
    diff_logs,
    estimate_memory,
    notification_lines,
    percentile,
    replay,
    run,
    trend,
)
from edgewatch.engines import ENGINE_NAMES, make_engine
from edgewatch.planner import Notification
from edgewatch.workload import WorkloadParams, write_workload

from conftest import FORUM_QUERY_TEXT, make_updates


@pytest.fixture(scope="module")
def workload_dir(tmp_path_factory):
    p = WorkloadParams(
        num_queries=12,
        avg_size=3,
        selectivity=0.5,
        overlap=0.3,
        num_edges=250,
        label_alphabet_size=6,
        seed=11,
    )
    out = tmp_path_factory.mktemp("wl")
    paths = write_workload(str(out), p)
    return paths


def test_percentile_edges():
    assert percentile([], 0.5) == 0.0
    assert percentile([7.0], 0.99) == 7.0
    vals = [float(i) for i in range(1, 101)]
    assert percentile(vals, 0.50) == 50.0
    assert percentile(vals, 0.99) == 99.0
    assert percentile(vals, 1.0) == 100.0


def test_replay_examined_deltas_sum():
    from edgewatch.queries import parse_query_file

    queries = parse_query_file(FORUM_QUERY_TEXT)
    updates = make_updates(
        ["hasMod f1 p1", "posted p1 pst1", "posted p1 pst2", "reply r1 pst2"]
    )
    engine = make_engine("inv")
    for q in queries:
        engine.index_query(q)
    latencies, log, examined = replay(engine, updates)
    assert len(latencies) == len(updates) == len(examined)
    assert sum(examined) == engine.stats.examined
    assert all(d >= 0 for d in examined)
    assert {n.query_id for n in log} == {"1", "2"}


def test_notification_lines_sorted_and_flat():
    log = [
        Notification(3, "9", frozenset({("b", "c"), ("a", "z")})),
        Notification(1, "2", frozenset({("x",)})),
    ]
    lines = notification_lines(log)
    assert lines == ["1\t2\tx", "3\t9\ta\tz", "3\t9\tb\tc"]
    assert lines == sorted(lines)


def test_run_report_and_csv_contract(workload_dir, tmp_path):
    out_csv = tmp_path / "per_update.csv"
    notify = tmp_path / "notify.tsv"
    report = run(
        BenchConfig(
            engine="tric",
            query_file=workload_dir["queries"],
            stream_file=workload_dir["stream"],
            output=str(out_csv),
            notify_log=str(notify),
        )
    )
    assert report.updates == 250
    assert report.queries == 12
    assert report.total_us >= report.mean_us > 0
    assert report.p99_us >= report.p50_us > 0
    assert report.memory_bytes > 0
    assert "tric" in report.summary_line()

    with open(out_csv, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["update_t", "latency_us", "notifications"]
    body, summary = rows[1:-1], rows[-1]
    assert len(body) == 250
    assert [r[0] for r in body] == [str(t) for t in range(1, 251)]
    # the summary row is recomputable from the rows above it
    assert summary[0] == "summary"
    mean = sum(float(r[1]) for r in body) / len(body)
    assert abs(mean - float(summary[1])) < 0.01
    assert sum(int(r[2]) for r in body) == int(summary[2]) == report.notifications

    with open(notify, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    keys = []
    for line in lines:
        t, qid,rest = line.split("\t", 2)
        keys.append((int(t), qid, rest))
    assert keys == sorted(keys)  # numeric timestamp order
    assert len(lines) == report.embeddings


def test_run_repetitions_average(workload_dir):
    report = run(
        BenchConfig(
            engine="inv",
            query_file=workload_dir["queries"],
            stream_file=workload_dir["stream"],
            warmup=1,
            repetitions=2,
        )
    )
    assert report.repetitions == 2
    assert report.mean_us > 0


def test_diff_logs_identical_and_divergent():
    a = ["1\tq\tx", "2\tq\ty"]
    same = diff_logs({"e1": list(a), "e2": list(a)})
    assert same.identical
    assert "identical" in same.describe()
    assert same.counts == {"e1": 2, "e2": 2}

    b = ["1\tq\tx", "2\tq\tz"]
    differ = diff_logs({"e1": a, "e2": b})
    assert not differ.identical
    assert differ.divergence["line"] == 1
    assert differ.divergence["expected"] == "2\tq\ty"
    assert differ.divergence["got"] == "2\tq\tz"
    assert "MISMATCH" in differ.describe()

    short = diff_logs({"e1": a, "e2": a[:1]})
    assert not short.identical
    assert short.divergence["got"] == "<missing>"


def test_diff_all_engines_identical(workload_dir):
    from edgewatch.core import read_stream_file
    from edgewatch.queries import read_query_file

    queries = read_query_file(workload_dir["queries"])
    updates = read_stream_file(workload_dir["stream"])
    result = diff(list(ENGINE_NAMES), queries, updates)
    assert result.identical, result.describe()
    assert result.counts[ENGINE_NAMES[0]] > 0


def test_diff_files_entry_point(workload_dir):
    result = diff_files(
        ["oracle", "tric"], workload_dir["queries"], workload_dir["stream"]
    )
    assert result.identical


def test_trend_row_shape():
    base = WorkloadParams(
        num_queries=8,
        avg_size=2,
        selectivity=0.25,
        overlap=0.25,
        num_edges=120,
        label_alphabet_size=5,
        seed=2,
    )
    rows = trend(base, "num_edges", [120, 240], ["tric", "inv"], seeds=[2, 3])
    assert len(rows) == 4
    assert {(r["value"], r["engine"]) for r in rows} == {
        (120, "tric"),
        (120, "inv"),
        (240, "tric"),
        (240, "inv"),
    }
    for r in rows:
        assert r["param"] == "num_edges"
        assert r["runs"] == 2
        assert r["mean_us"] > 0


def test_estimate_memory_walks_structures():
    small = estimate_memory({"a": 1})
    big = estimate_memory({"a": list(range(1000)), "b": "x" * 500})
    assert big > small > 0
    # cycles terminate
    x = []
    x.append(x)
    assert estimate_memory(x) > 0


def test_estimate_memory_grows_with_state(workload_dir):
    from edgewatch.core import read_stream_file
    from edgewatch.queries import read_query_file

    engine = make_engine("tric")
    for q in read_query_file(workload_dir["queries"]):
        engine.index_query(q)
    before = estimate_memory(engine)
    for u in read_stream_file(workload_dir["stream"]):
        engine.answer_update(u)
    after = estimate_memory(engine)
    assert after > before
