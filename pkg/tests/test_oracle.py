"""Brute-force reference matcher, checked against independent counts."""

import random

import numpy as np

from edgewatch.core import EdgeTriple, Update
from edgewatch.oracle import (
    OracleEngine,
    TripleIndex,
    enumerate_embeddings,
    has_embedding,
)
from edgewatch.queries import parse_query

from conftest import make_updates


def random_digraph(rng, n, m, label="e"):
    """Self-loop-free digraph as a triple list plus its adjacency matrix."""
    edges = set()
    while len(edges) < m:
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            edges.add((a, b))
    triples = [EdgeTriple(label, f"v{a}", f"v{b}") for a, b in sorted(edges)]
    adj = np.zeros((n, n), dtype=np.int64)
    for a, b in edges:
        adj[a, b] = 1
    return triples, adj


def test_single_edge_query_golden():
    idx = TripleIndex(
        [EdgeTriple("likes", "u1", "p1"), EdgeTriple("likes", "u2", "p1")]
    )
    q = parse_query("Q 1\nlikes\t?u\tp1\n")
    embs = enumerate_embeddings(idx, q)
    assert sorted(e["?u"] for e in embs) == ["u1", "u2"]
    assert all(e["p1"] == "p1" for e in embs)


def test_literal_only_query():
    idx = TripleIndex([EdgeTriple("likes", "u1", "p1")])
    q = parse_query("Q 1\nlikes\tu1\tp1\n")
    assert len(enumerate_embeddings(idx, q)) == 1
    q2 = parse_query("Q 2\nlikes\tu1\tp2\n")
    assert enumerate_embeddings(idx, q2) == []


def test_triangle_count_matches_matrix_trace():
    """Directed 3-cycle homomorphisms == trace(A^3) on loop-free graphs."""
    rng = random.Random(13)
    q = parse_query("Q t\ne\t?a\t?b\ne\t?b\t?c\ne\t?c\t?a\n")
    for _ in range(12):
        n = rng.randint(4, 9)
        m = rng.randint(n, min(n * (n - 1), 3 * n))
        triples, adj = random_digraph(rng, n, m)
        idx = TripleIndex(triples)
        expected = int(np.trace(np.linalg.matrix_power(adj, 3)))
        hom = enumerate_embeddings(idx, q, mode="homomorphism")
        iso = enumerate_embeddings(idx, q, mode="isomorphism")
        assert len(hom) == expected
        # without self-loops a length-3 closed walk can't repeat a vertex
        assert len(iso) == expected


def test_two_path_count_matches_matrix_square():
    rng = random.Random(29)
    q = parse_query("Q p\ne\t?a\t?b\ne\t?b\t?c\n")
    for _ in range(8):
        triples, adj = random_digraph(rng, rng.randint(4, 8), rng.randint(5, 16))
        idx = TripleIndex(triples)
        expected = int((np.linalg.matrix_power(adj, 2)).sum())
        assert len(enumerate_embeddings(idx, q)) == expected


def test_iso_subset_of_hom():
    rng = random.Random(3)
    q = parse_query("Q s\ne\t?a\t?b\ne\t?a\t?c\n")
    for _ in range(10):
        triples, _ = random_digraph(rng, 6, 10)
        idx = TripleIndex(triples)
        hom = {tuple(sorted(e.items())) for e in enumerate_embeddings(idx, q)}
        iso = {
            tuple(sorted(e.items()))
            for e in enumerate_embeddings(idx, q, mode="isomorphism")
        }
        assert iso <= hom
        for emb in iso:
            vals = [v for _, v in emb]
            assert len(set(vals)) == len(vals)


def test_must_include_anchors_the_triple():
    rng = random.Random(37)
    q = parse_query("Q a\ne\t?a\t?b\ne\t?b\t?c\n")
    triples, _ = random_digraph(rng, 6, 12)
    idx = TripleIndex(triples)
    anchor = triples[0]
    for emb in enumerate_embeddings(idx, q, must_include=anchor):
        uses = any(
            emb[e.source] == anchor.source and emb[e.target] == anchor.target
            for e in q.edges
            if e.label == anchor.label
        )
        assert uses


def test_replay_union_equals_final_enumeration():
    """Anchored per-update results over a stream sum to the final answer."""
    rng = random.Random(41)
    q = parse_query("Q r\ne\t?a\t?b\nf\t?b\t?c\n")
    triples = []
    for _ in range(40):
        lab = rng.choice(["e", "f"])
        triples.append(
            EdgeTriple(lab, f"v{rng.randrange(6)}", f"v{rng.randrange(6)}")
        )
    idx = TripleIndex()
    union = set()
    for t in triples:
        if not idx.add(t):
            continue
        for emb in enumerate_embeddings(idx, q, must_include=t):
            union.add(tuple(sorted(emb.items())))
    final = {
        tuple(sorted(e.items()))
        for e in enumerate_embeddings(TripleIndex(triples), q)
    }
    assert union == final


def test_has_embedding_matches_enumeration():
    rng = random.Random(53)
    q = parse_query("Q h\ne\t?a\t?b\ne\t?b\t?a\n")
    for _ in range(15):
        triples, _ = random_digraph(rng, 5, rng.randint(2, 10))
        idx = TripleIndex(triples)
        assert has_embedding(idx, q) == bool(enumerate_embeddings(idx, q))


def test_oracle_engine_notifications(single_edge_query):
    engine = OracleEngine()
    engine.index_query(single_edge_query)
    updates = make_updates(["likes u1 p1", "follows u1 u2", "likes u1 p1"])
    notes = engine.answer_update(updates[0])
    assert len(notes) == 1
    assert notes[0].query_id == "s1"
    assert notes[0].embeddings == frozenset({("u1", "p1")})
    assert engine.answer_update(updates[1]) == []
    # duplicate triple is a global no-op
    assert engine.answer_update(updates[2]) == []
    assert engine.stats.duplicates == 1


def test_oracle_engine_multi_edge_completion(forum_queries):
    engine = OracleEngine()
    for q in forum_queries:
        engine.index_query(q)
    updates = make_updates(
        [
            "hasMod f2 p2",
            "posted p2 pst1",
            "posted p2 pst2",
            "containedIn pst1 w1",
            "reply r9 pst2",
        ]
    )
    log = []
    for u in updates:
        log.extend(engine.answer_update(u))
    by_query = {}
    for n in log:
        by_query.setdefault(n.query_id, set()).update(n.embeddings)
    assert by_query["2"] == {("f2", "p2")}
    assert by_query["4"] == {("f2", "p2", "pst1", "w1")}
    assert by_query["1"] == {("f2", "p2", "pst1", "pst2", "r9")}
    assert "3" not in by_query
