"""Inverted-index baselines: index content, candidate routing, INC vs INV."""

import random

import pytest

from edgewatch.core import ANON_VAR, EdgePattern
from edgewatch.engines import EngineError, make_engine
from edgewatch.inverted import IncEngine, InvEngine
from edgewatch.queries import parse_query

from conftest import log_lines, make_updates, replay_engine


def test_index_content(forum_queries):
    engine = InvEngine()
    for q in forum_queries:
        engine.index_query(q)
    posted1 = EdgePattern("posted", ANON_VAR, "pst1")
    assert engine.edge_ind[posted1] == {"1", "3", "4"}
    assert engine.edge_ind[EdgePattern("hasMod", ANON_VAR, ANON_VAR)] == {
        "1",
        "2",
        "4",
    }
    assert set(engine.query_ind) == {"1", "2", "3", "4"}
    assert engine.max_path_len == 3
    # raw views exist for every registered pattern
    assert posted1 in engine.raw.views


def test_shared_pattern_grows_value_set():
    engine = InvEngine()
    pat = EdgePattern("likes", ANON_VAR, ANON_VAR)
    for i in range(10):
        engine.index_query(parse_query(f"Q {i}\nlikes\t?a{i}\t?b{i}\n"))
        assert engine.edge_ind[pat] == {str(k) for k in range(i + 1)}
    assert len(engine.edge_ind) == 1  # one key, ten queries


def test_duplicate_query_id_rejected(single_edge_query):
    engine = InvEngine()
    engine.index_query(single_edge_query)
    with pytest.raises(EngineError):
        engine.index_query(single_edge_query)


def test_candidates_require_nonempty_views(forum_queries):
    engine = InvEngine()
    for q in forum_queries:
        engine.index_query(q)
    updates = make_updates(["posted p2 pst1", "hasMod f2 p2"])
    from edgewatch.core import generic_keys

    # before any state: all views empty, so the update itself must fill one
    engine.answer_update(updates[0])
    keys = frozenset(generic_keys(updates[0].triple))
    # posted touches Q1/Q3/Q4, but each needs other nonempty views too
    assert engine.candidates(keys) == []

    engine.answer_update(updates[1])
    keys2 = frozenset(generic_keys(updates[1].triple))
    # hasMod completes Q2's only view and Q2 alone qualifies
    assert engine.candidates(keys2) == ["2"]


def test_single_edge_query_immediate(single_edge_query):
    engine = InvEngine()
    engine.index_query(single_edge_query)
    notes = engine.answer_update(make_updates(["likes u1 p1"])[0])
    assert [(n.query_id, n.embeddings) for n in notes] == [
        ("s1", frozenset({("u1", "p1")}))
    ]


def test_explore_bounds_candidate_patterns(forum_queries):
    engine = InvEngine()
    for q in forum_queries:
        engine.index_query(q)
    for u in make_updates(["hasMod f2 p2", "posted p2 pst1"]):
        engine.answer_update(u)
    from edgewatch.core import generic_keys

    keys = frozenset(generic_keys(u.triple))
    cand = engine.candidates(keys)
    reached = engine.explore(keys, cand)
    allowed = set()
    for qid in cand:
        allowed.update(engine.query_ind[qid].distinct_patterns)
    assert reached <= allowed
    # the matched pattern itself is always reached
    assert any(p in reached for p in keys if p in allowed) or not cand


def forum_stream(rng, n):
    lines = []
    for i in range(n):
        pick = rng.random()
        if pick < 0.25:
            lines.append(f"hasMod\tf{rng.randint(0, 3)}\tp{rng.randint(0, 6)}")
        elif pick < 0.5:
            lines.append(f"posted\tp{rng.randint(0, 6)}\tpst{rng.randint(1, 2)}")
        elif pick < 0.65:
            lines.append(f"reply\tr{i}\tpst{rng.randint(1, 2)}")
        elif pick < 0.8:
            lines.append(f"containedIn\tpst1\tw{rng.randint(0, 3)}")
        else:
            lines.append(f"hasCreator\tcom1\tp{rng.randint(0, 6)}")
    return make_updates(lines)


def test_all_engines_agree_on_forum(forum_queries):
    rng = random.Random(7)
    updates = forum_stream(rng, 150)
    logs = {}
    for name in ("oracle", "tric", "tric+", "inv", "inv+", "inc", "inc+"):
        _, log = replay_engine(name, forum_queries, updates)
        logs[name] = log_lines(log)
    base = logs["oracle"]
    assert base, "scenario should produce notifications"
    for name, lines in logs.items():
        assert lines == base, f"{name} diverged"


def test_inc_examined_never_exceeds_inv(forum_queries):
    rng = random.Random(19)
    updates = forum_stream(rng, 250)
    inv = InvEngine()
    inc = IncEngine()
    for q in forum_queries:
        inv.index_query(q)
        inc.index_query(q)
    for u in updates:
        before_inv = inv.stats.examined
        before_inc = inc.stats.examined
        inv.answer_update(u)
        inc.answer_update(u)
        assert (
            inc.stats.examined - before_inc <= inv.stats.examined - before_inv
        ), f"update {u.t}"


def test_engine_factory_names():
    assert type(make_engine("inv")) is InvEngine
    assert type(make_engine("inc")) is IncEngine
    assert make_engine("inv+").caching
    assert make_engine("inc+").caching
    assert not make_engine("inc").caching
