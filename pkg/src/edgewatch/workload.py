"""Synthetic workload generation: query sets and edge streams.

Everything is driven by one integer seed through named child generators, so
a workload is reproducible byte-for-byte from its parameter set.

Queries mix three shapes (chain, star with out-edges, cycle) with sizes
drawn uniformly from {avg_size-2 .. avg_size+2} clipped at 1.  Each vertex
independently becomes a literal with probability 0.3, otherwise a variable;
literal names come from a small pool of hot constants, mirroring real
workloads where many queries reference the same few well-known entities.
An ``overlap`` fraction of queries embeds a shared seed sub-path of length
ceil(avg_size/2), drawn from a small pool, as its leading edges; seeds carry
their own fixed literal choices so overlapping queries agree on genericized
prefixes, which is what gives index-sharing engines something to share.
Stars cannot host a multi-edge sub-path, so the lottery runs over chains and
cycles at a rate scaled to keep the seeded fraction of all queries near
``overlap``.

Streams place one satisfying embedding for a ``selectivity`` fraction of
queries (variables instantiated with fresh vertex labels, edges planted in
covering-path walk order at random positions) and fill the rest with noise
triples.  Each noise endpoint is a hot constant with probability
``hot_noise_prob``, otherwise a vertex from a pool sized independently of
the label alphabet.  A noise triple is rejected (bounded retries) when it
would duplicate an existing triple, repeat a fully-literal edge of a
non-planted query, or satisfy a single-edge non-planted query outright;
multi-edge accidental satisfaction still needs several coincidences to line
up and is kept within tolerance by pool sizing rather than by filtering.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from typing import Optional

from .core import EdgePattern, EdgeTriple, Update, intern_label
from .queries import QueryGraphPattern, covering_paths, format_query
from .oracle import TripleIndex, has_embedding

LITERAL_PROB = 0.3
SEED_POOL_SIZE = 4
NOISE_RETRIES = 40


class WorkloadError(ValueError):
    pass


@dataclass(frozen=True)
class WorkloadParams:
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

    def validate(self) -> None:
        if self.num_queries < 0:
            raise WorkloadError("num_queries must be >= 0")
        if self.avg_size < 1:
            raise WorkloadError("avg_size must be >= 1")
        if not 0.0 <= self.selectivity <= 1.0:
            raise WorkloadError("selectivity must be in [0, 1]")
        if not 0.0 <= self.overlap <= 1.0:
            raise WorkloadError("overlap must be in [0, 1]")
        if self.num_edges < 0:
            raise WorkloadError("num_edges must be >= 0")
        if self.label_alphabet_size < 1:
            raise WorkloadError("label_alphabet_size must be >= 1")
        if self.vertex_pool_size is not None and self.vertex_pool_size < 1:
            raise WorkloadError("vertex_pool_size must be >= 1")
        if self.literal_pool_size is not None and self.literal_pool_size < 1:
            raise WorkloadError("literal_pool_size must be >= 1")
        if not 0.0 <= self.hot_noise_prob <= 1.0:
            raise WorkloadError("hot_noise_prob must be in [0, 1]")

    @property
    def pool_size(self) -> int:
        if self.vertex_pool_size is not None:
            return self.vertex_pool_size
        return max(16, 2 * self.label_alphabet_size, self.num_edges // 10)

    @property
    def hot_pool_size(self) -> int:
        if self.literal_pool_size is not None:
            return self.literal_pool_size
        return max(8, min(64, self.num_queries // 12))


def _edge_labels(params: WorkloadParams) -> list[str]:
    return [intern_label(f"e{i}") for i in range(params.label_alphabet_size)]


def _vertex_pool(params: WorkloadParams) -> list[str]:
    return [intern_label(f"n{i}") for i in range(params.pool_size)]


def _literal_pool(params: WorkloadParams) -> list[str]:
    return [intern_label(f"c{i}") for i in range(params.hot_pool_size)]


def _seed_pool(params: WorkloadParams, rng: random.Random) -> list[list[tuple]]:
    """Shared sub-paths: a list of (label, vertex_spec...) edge descriptors.

    A vertex spec is ('lit', label) or ('var',); seed literals are fixed in
    the pool so every query embedding the seed shares them.
    """
    labels = _edge_labels(params)
    literals = _literal_pool(params)
    length = max(1, math.ceil(params.avg_size / 2))
    seeds = []
    for _ in range(SEED_POOL_SIZE):
        specs = []
        for _ in range(length + 1):
            if rng.random() < LITERAL_PROB:
                specs.append(("lit", rng.choice(literals)))
            else:
                specs.append(("var",))
        edges = [
            (rng.choice(labels), specs[i], specs[i + 1]) for i in range(length)
        ]
        seeds.append(edges)
    return seeds


def gen_queries(params: WorkloadParams) -> list[QueryGraphPattern]:
    params.validate()
    rng = random.Random(f"{params.seed}|queries")
    labels = _edge_labels(params)
    literals = _literal_pool(params)
    seeds = _seed_pool(params, rng)
    # stars sit out the seed lottery, so the per-query rate is scaled up to
    # keep the overall seeded fraction near the requested overlap
    seed_rate = min(1.0, params.overlap * 1.5)

    queries: list[QueryGraphPattern] = []
    for qnum in range(1, params.num_queries + 1):
        shape = rng.choice(("chain", "star", "cycle"))
        k = max(1, params.avg_size + rng.randint(-2, 2))
        seeded = rng.random() < seed_rate and shape != "star"
        seed = rng.choice(seeds) if seeded else None

        def fresh_spec():
            if rng.random() < LITERAL_PROB:
                return ("lit", rng.choice(literals))
            return ("var",)

        if shape == "chain":
            nverts = k + 1
            vertex_edges = [(i, i + 1) for i in range(k)]
        elif shape == "star":
            nverts = k + 1
            vertex_edges = [(0, i + 1) for i in range(k)]
        else:
            nverts = k
            vertex_edges = [(i, (i + 1) % k) for i in range(k)]

        specs: list[Optional[tuple]] = [None] * nverts
        edge_labels: list[Optional[str]] = [None] * k
        if seed is not None:
            s = min(len(seed), k if shape == "chain" else max(1, k - 1))
            if shape == "cycle" and k == 1:
                s = 0
            for j in range(s):
                label, src_spec, tgt_spec = seed[j]
                edge_labels[j] = label
                specs[j] = src_spec
                specs[j + 1] = tgt_spec
        for i in range(nverts):
            if specs[i] is None:
                specs[i] = fresh_spec()
        for j in range(k):
            if edge_labels[j] is None:
                edge_labels[j] = rng.choice(labels)

        names = [
            spec[1] if spec[0] == "lit" else f"?v{i}" for i, spec in enumerate(specs)
        ]
        edges = []
        seen = set()
        for j, (a, b) in enumerate(vertex_edges):
            e = (edge_labels[j], names[a], names[b])
            if e not in seen:
                seen.add(e)
                edges.append(e)
        query = QueryGraphPattern(
            str(qnum),
            tuple(EdgePattern(intern_label(l), intern_label(s), intern_label(t)) for l, s, t in edges),
        )
        queries.append(query)
    return queries


def gen_stream(
    params: WorkloadParams, queries: list[QueryGraphPattern]
) -> tuple[list[Update], dict]:
    """Build the update stream; returns (updates, plant report)."""
    params.validate()
    rng = random.Random(f"{params.seed}|stream")
    labels = _edge_labels(params)
    pool_vertices = _vertex_pool(params)
    literals = _literal_pool(params)

    planted_count = round(params.selectivity * len(queries))
    planted_idx = sorted(rng.sample(range(len(queries)), planted_count))
    planted_set = set(planted_idx)

    fresh_counter = 0
    plants: list[list[EdgeTriple]] = []
    for qi in planted_idx:
        q = queries[qi]
        decomp = covering_paths(q)
        assign: dict[str, str] = {}
        for ident in q.identities():
            if ident.startswith("?"):
                assign[ident] = intern_label(f"v{fresh_counter}")
                fresh_counter += 1
            else:
                assign[ident] = ident
        triples: list[EdgeTriple] = []
        seen_edges: set[int] = set()
        for path in decomp.paths:
            for eidx in path.edge_indices:
                if eidx in seen_edges:
                    continue
                seen_edges.add(eidx)
                e = q.edges[eidx]
                triples.append(EdgeTriple(e.label, assign[e.source], assign[e.target]))
        plants.append(triples)

    total_planted = sum(len(p) for p in plants)
    if total_planted > params.num_edges:
        raise WorkloadError(
            f"cannot plant {total_planted} edges into a stream of {params.num_edges}"
        )

    # noise must not hand a non-planted query a complete match for free:
    # fully-literal edges are matched by exactly one triple, and any edge of
    # a single-edge query is the whole query, so those are screened out
    avoid_exact: set[EdgeTriple] = set()
    avoid_src: set[tuple[str, str]] = set()
    avoid_tgt: set[tuple[str, str]] = set()
    avoid_label: set[str] = set()
    for qi, q in enumerate(queries):
        if qi in planted_set:
            continue
        whole_query = len(q.edges) == 1
        for e in q.edges:
            src_lit = not e.source.startswith("?")
            tgt_lit = not e.target.startswith("?")
            if src_lit and tgt_lit:
                avoid_exact.add(EdgeTriple(e.label, e.source, e.target))
            elif not whole_query:
                continue
            elif src_lit:
                avoid_src.add((e.label, e.source))
            elif tgt_lit:
                avoid_tgt.add((e.label, e.target))
            else:
                avoid_label.add(e.label)

    slots: list[Optional[EdgeTriple]] = [None] * params.num_edges
    if total_planted:
        positions = sorted(rng.sample(range(params.num_edges), total_planted))
        tags: list[int] = []
        for i, triples in enumerate(plants):
            tags.extend([i] * len(triples))
        rng.shuffle(tags)
        cursors = [0] * len(plants)
        for pos, tag in zip(positions, tags):
            slots[pos] = plants[tag][cursors[tag]]
            cursors[tag] += 1

    def endpoint() -> str:
        if rng.random() < params.hot_noise_prob:
            return rng.choice(literals)
        return rng.choice(pool_vertices)

    used: set[EdgeTriple] = set(t for p in plants for t in p)
    for i in range(params.num_edges):
        if slots[i] is not None:
            continue
        triple = None
        for _ in range(NOISE_RETRIES):
            cand = EdgeTriple(rng.choice(labels), endpoint(), endpoint())
            if cand in used:
                continue
            if (
                cand in avoid_exact
                or cand.label in avoid_label
                or (cand.label, cand.source) in avoid_src
                or (cand.label, cand.target) in avoid_tgt
            ):
                continue
            triple = cand
            break
        if triple is None:
            triple = cand  # tolerance: retries exhausted, accept the last
        used.add(triple)
        slots[i] = triple

    updates = [Update(i + 1, t) for i, t in enumerate(slots)]
    report = {
        "planted_queries": planted_count,
        "planted_edges": total_planted,
        "planted_ids": [queries[i].id for i in planted_idx],
        "plants": {queries[qi].id: plants[k] for k, qi in enumerate(planted_idx)},
    }
    return updates, report


def measure_selectivity(
    queries: list[QueryGraphPattern],
    updates: list[Update],
    mode: str = "homomorphism",
) -> float:
    """Fraction of queries with at least one embedding at stream end."""
    if not queries:
        return 0.0
    index = TripleIndex(u.triple for u in updates)
    sat = sum(1 for q in queries if has_embedding(index, q, mode))
    return sat / len(queries)


# -- file formats -----------------------------------------------------------


def write_manifest(path: str, params: WorkloadParams, extra: dict | None = None) -> None:
    lines = [
        f"num_queries={params.num_queries}",
        f"avg_size={params.avg_size}",
        f"selectivity={params.selectivity}",
        f"overlap={params.overlap}",
        f"num_edges={params.num_edges}",
        f"label_alphabet_size={params.label_alphabet_size}",
        f"vertex_pool_size={params.pool_size}",
        f"literal_pool_size={params.hot_pool_size}",
        f"hot_noise_prob={params.hot_noise_prob}",
        f"seed={params.seed}",
    ]
    for k, v in (extra or {}).items():
        lines.append(f"{k}={v}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_manifest(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise WorkloadError(f"manifest line {lineno}: expected key=value")
        k, _, v = line.partition("=")
        out[k.strip()] = v.strip()
    return out


def params_from_manifest(values: dict[str, str]) -> WorkloadParams:
    try:
        return WorkloadParams(
            num_queries=int(values["num_queries"]),
            avg_size=int(values["avg_size"]),
            selectivity=float(values["selectivity"]),
            overlap=float(values["overlap"]),
            num_edges=int(values["num_edges"]),
            label_alphabet_size=int(values.get("label_alphabet_size", "100")),
            seed=int(values.get("seed", "0")),
            vertex_pool_size=int(values["vertex_pool_size"])
            if "vertex_pool_size" in values
            else None,
            literal_pool_size=int(values["literal_pool_size"])
            if "literal_pool_size" in values
            else None,
            hot_noise_prob=float(values.get("hot_noise_prob", "0.25")),
        )
    except KeyError as e:
        raise WorkloadError(f"manifest missing key {e.args[0]!r}") from None


def write_workload(out_dir: str, params: WorkloadParams) -> dict[str, str]:
    """Generate and write queries.txt, stream.txt, manifest.txt."""
    os.makedirs(out_dir, exist_ok=True)
    queries = gen_queries(params)
    updates, report = gen_stream(params, queries)
    qpath = os.path.join(out_dir, "queries.txt")
    spath = os.path.join(out_dir, "stream.txt")
    mpath = os.path.join(out_dir, "manifest.txt")
    with open(qpath, "w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(format_query(q))
    with open(spath, "w", encoding="utf-8") as fh:
        for u in updates:
            fh.write(f"{u.triple.label}\t{u.triple.source}\t{u.triple.target}\n")
    write_manifest(
        mpath,
        params,
        {
            "planted_queries": report["planted_queries"],
            "planted_edges": report["planted_edges"],
            "query_file": "queries.txt",
            "stream_file": "stream.txt",
        },
    )
    return {"queries": qpath, "stream": spath, "manifest": mpath}
