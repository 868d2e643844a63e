"""Query plans: per-path metadata and the shared final-join evaluator.

A plan fixes, once per query at registration time, everything the answering
hot path needs: genericized step patterns per covering path, the positions
within a path that repeat an identity (and therefore become equality
filters), and the output schema.

The output schema has one column per distinct vertex identity, ordered by
first occurrence in (path index, position) order.  Because the covering-path
decomposition is deterministic, every engine derives the same schema, which
is what makes notification logs comparable across engines.

New results for an update are computed as a union of delta terms, one per
path touched by the update: the term for path p joins p's delta against the
other paths' full (post-update) views.  Unioning the terms with set
semantics is exactly the inclusion-exclusion-free form of the incremental
join expansion, and it is what keeps multi-path self-joins correct when one
update touches several paths at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

from .core import EdgePattern, EdgeTriple
from .queries import (
    PathDecomposition,
    QueryGraphPattern,
    covering_paths,
)
from .views import (
    JoinCache,
    JoinStats,
    MaterializedView,
    cartesian_rows,
    join_rows,
    join_rows_cached,
)


class Notification(NamedTuple):
    """One emission: new embeddings of a query produced by one update."""

    t: int
    query_id: str
    embeddings: frozenset


@dataclass(frozen=True)
class PathInfo:
    steps: tuple[EdgePattern, ...]  # genericized, one per edge
    positions: tuple[str, ...]  # identity per walk position
    first_positions: tuple[int, ...]  # positions introducing their identity
    eq_pairs: tuple[tuple[int, int], ...]  # (first, repeat) position pairs
    idents: tuple[str, ...]  # identity per first position


@dataclass(frozen=True)
class QueryPlan:
    query: QueryGraphPattern
    decomp: PathDecomposition
    paths: tuple[PathInfo, ...]
    final_columns: tuple[str, ...]
    distinct_patterns: frozenset[EdgePattern]
    max_path_len: int


def build_plan(query: QueryGraphPattern) -> QueryPlan:
    decomp = covering_paths(query)
    infos = []
    final_cols: list[str] = []
    patterns: set[EdgePattern] = set()
    for path in decomp.paths:
        first: dict[str, int] = {}
        first_pos: list[int] = []
        eq_pairs: list[tuple[int, int]] = []
        for i, ident in enumerate(path.positions):
            if ident in first:
                eq_pairs.append((first[ident], i))
            else:
                first[ident] = i
                first_pos.append(i)
            if ident not in final_cols:
                final_cols.append(ident)
        steps = tuple(e.genericized() for e in path.edges)
        patterns.update(steps)
        infos.append(
            PathInfo(
                steps=steps,
                positions=path.positions,
                first_positions=tuple(first_pos),
                eq_pairs=tuple(eq_pairs),
                idents=tuple(path.positions[i] for i in first_pos),
            )
        )
    return QueryPlan(
        query=query,
        decomp=decomp,
        paths=tuple(infos),
        final_columns=tuple(final_cols),
        distinct_patterns=frozenset(patterns),
        max_path_len=max(len(p.steps) for p in infos),
    )


def matched_steps(info: PathInfo, key_set: frozenset[EdgePattern]) -> list[int]:
    """Step indexes of a path whose generic pattern admits the update."""
    return [i for i, s in enumerate(info.steps) if s in key_set]


def filter_eq(
    rows: Sequence[tuple],
    info: PathInfo,
    stats: JoinStats,
) -> Sequence[tuple]:
    """Enforce repeated-identity equalities within one path's rows."""
    pairs = info.eq_pairs
    if not pairs or not rows:
        return rows
    stats.examined += len(rows)
    out = []
    for r in rows:
        ok = True
        for a, b in pairs:
            if r[a] != r[b]:
                ok = False
                break
        if ok:
            out.append(r)
    return out


def new_result_rows(
    plan: QueryPlan,
    rows,
    triple: EdgeTriple,
    stats: JoinStats,
) -> list[tuple]:
    """Filter full query results down to those binding the new edge.

    An assignment pins every required graph triple, and edges are never
    deleted, so a result is new exactly when some query edge maps onto the
    update's triple.
    """
    if not rows:
        return []
    col = {ident: i for i, ident in enumerate(plan.final_columns)}
    checks = [
        (col[e.source], col[e.target])
        for e in plan.query.edges
        if e.label == triple.label
    ]
    if not checks:
        return []
    stats.examined += len(rows)
    s, t = triple.source, triple.target
    out = []
    for r in rows:
        for sc, tc in checks:
            if r[sc] == s and r[tc] == t:
                out.append(r)
                break
    return out


def compute_path_rows(
    info: PathInfo,
    raw_rows: Callable[[int], Sequence[tuple]],
    stats: JoinStats,
    cache: Optional[JoinCache] = None,
    raw_view: Optional[Callable[[int], MaterializedView]] = None,
    seed_step: Optional[int] = None,
    seed: Optional[Sequence[tuple]] = None,
) -> Sequence[tuple]:
    """Left-deep join of a path's raw step views (adjacency only).

    Repeated-identity filters are *not* applied here; path views carry raw
    positional adjacency exactly like trie node views do.

    With ``seed_step``/``seed`` the given rows replace that step's raw view,
    turning the same left-deep pipeline into a delta computation: since the
    seed is a subset of the step's view, every intermediate stays a subset
    of the full path view's, join for join.
    """
    acc: Sequence[tuple] = seed if seed_step == 0 else raw_rows(0)  # type: ignore[assignment]
    for j in range(1, len(info.steps)):
        if not acc:
            return []
        if j == seed_step:
            acc = join_rows(acc, seed, j, 0, stats)  # type: ignore[arg-type]
        elif cache is not None and raw_view is not None:
            acc = join_rows_cached(acc, j, raw_view(j), 0, cache, stats, "left")
        else:
            acc = join_rows(acc, raw_rows(j), j, 0, stats)
    return acc


def _project_first(
    rows: Sequence[tuple], info: PathInfo, stats: JoinStats
) -> list[tuple]:
    """Drop repeated-identity columns, keeping first occurrences."""
    if not rows:
        return []
    stats.examined += len(rows)
    if len(info.first_positions) == len(info.positions):
        return list(rows)
    first = info.first_positions
    return [tuple(r[i] for i in first) for r in rows]


def evaluate_terms(
    plan: QueryPlan,
    full_rows: Callable[[int], Sequence[tuple]],
    deltas: dict[int, Sequence[tuple]],
    stats: JoinStats,
    injective: bool = False,
    cache: Optional[JoinCache] = None,
    full_view: Optional[Callable[[int], Optional[MaterializedView]]] = None,
) -> set[tuple]:
    """Union of per-touched-path delta terms, projected onto the schema.

    ``full_rows(i)`` must return path i's complete post-update view rows;
    ``deltas`` maps touched path indexes to their unfiltered delta rows.
    When ``full_view`` yields a persistent view for a path (and the path has
    no internal equality pairs), term extension probes a cached index on it
    instead of rebuilding a hash table per term.
    """
    results: set[tuple] = set()
    if not deltas:
        return results
    npaths = len(plan.paths)
    filtered: dict[int, Sequence[tuple]] = {}

    def ffull(i: int) -> Sequence[tuple]:
        if i not in filtered:
            filtered[i] = filter_eq(full_rows(i), plan.paths[i], stats)
        return filtered[i]

    for p in sorted(deltas):
        dinfo = plan.paths[p]
        drows = filter_eq(deltas[p], dinfo, stats)
        if not drows:
            continue
        acc = _project_first(drows, dinfo, stats)
        acc_idents = list(dinfo.idents)
        ok = True
        for q in range(npaths):
            if not acc:
                ok = False
                break
            if q == p:
                continue
            qinfo = plan.paths[q]
            ident_to_acc = {ident: i for i, ident in enumerate(acc_idents)}
            shared: list[tuple[int, int]] = []  # (acc col, q position)
            new_positions: list[int] = []
            for pos, ident in zip(qinfo.first_positions, qinfo.idents):
                a = ident_to_acc.get(ident)
                if a is None:
                    new_positions.append(pos)
                else:
                    shared.append((a, pos))
            use_cache = (
                cache is not None
                and full_view is not None
                and not qinfo.eq_pairs
                and full_view(q) is not None
            )
            if not shared:
                qrows: Sequence[tuple]
                qrows = full_view(q).rows if use_cache else ffull(q)  # type: ignore[union-attr]
                if len(qinfo.first_positions) != len(qinfo.positions):
                    qrows = _project_first(qrows, qinfo, stats)
                acc = cartesian_rows(acc, qrows, stats)
            else:
                lcol, rpos = shared[0]
                extra = [(a, pos) for a, pos in shared[1:]]
                dup_drop = {
                    i
                    for i in range(len(qinfo.positions))
                    if i not in qinfo.first_positions
                }
                drop = {pos for _, pos in shared[1:]} | dup_drop
                if use_cache:
                    acc = join_rows_cached(
                        acc,
                        lcol,
                        full_view(q),  # type: ignore[arg-type]
                        rpos,
                        cache,
                        stats,
                        "left",
                        extra,
                        drop,
                    )
                else:
                    acc = join_rows(acc, ffull(q), lcol, rpos, stats, extra, drop)
            for pos in new_positions:
                acc_idents.append(qinfo.positions[pos])
            if not acc:
                ok = False
                break
        if not ok or not acc:
            continue
        perm = [acc_idents.index(c) for c in plan.final_columns]
        stats.examined += len(acc)
        for r in acc:
            out = tuple(r[i] for i in perm)
            if injective and len(set(out)) != len(out):
                continue
            results.add(out)
    return results
