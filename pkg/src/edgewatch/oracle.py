"""Reference engine: direct backtracking enumeration over the graph.

The oracle shares nothing with the view/join machinery; it matches the
query graph edge by edge against adjacency indexes.  It exists to be slow,
obviously correct, and structurally independent, so that agreement with the
incremental engines is meaningful evidence rather than a shared-bug echo.

``enumerate_embeddings`` returns complete assignments of query identities to
graph vertices.  With ``must_include`` set, only embeddings mapping at least
one query edge onto that triple are produced, which is exactly the "new
results" semantics of an update notification.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .core import EdgeTriple, Update, is_variable
from .engines import BaseEngine, EngineError
from .planner import Notification, build_plan
from .queries import QueryGraphPattern


class TripleIndex:
    """Label / (label, source) / (label, target) adjacency over a triple set."""

    __slots__ = ("triples", "by_label", "by_ls", "by_lt")

    def __init__(self, triples: Iterable[EdgeTriple] = ()):
        self.triples: set[EdgeTriple] = set()
        self.by_label: dict[str, list[EdgeTriple]] = {}
        self.by_ls: dict[tuple[str, str], list[EdgeTriple]] = {}
        self.by_lt: dict[tuple[str, str], list[EdgeTriple]] = {}
        for t in triples:
            self.add(t)

    def add(self, triple: EdgeTriple) -> bool:
        if triple in self.triples:
            return False
        self.triples.add(triple)
        self.by_label.setdefault(triple.label, []).append(triple)
        self.by_ls.setdefault((triple.label, triple.source), []).append(triple)
        self.by_lt.setdefault((triple.label, triple.target), []).append(triple)
        return True


def _candidate_count(index: TripleIndex, edge) -> int:
    src_lit = not is_variable(edge.source)
    tgt_lit = not is_variable(edge.target)
    if src_lit and tgt_lit:
        return 1 if EdgeTriple(edge.label, edge.source, edge.target) in index.triples else 0
    if src_lit:
        return len(index.by_ls.get((edge.label, edge.source), ()))
    if tgt_lit:
        return len(index.by_lt.get((edge.label, edge.target), ()))
    return len(index.by_label.get(edge.label, ()))


def enumerate_embeddings(
    index: TripleIndex,
    query: QueryGraphPattern,
    must_include: Optional[EdgeTriple] = None,
    mode: str = "homomorphism",
) -> list[dict[str, str]]:
    """All assignments of the query's identities satisfying every edge.

    Literal identities are bound to themselves.  In isomorphism mode all
    bound values must be pairwise distinct, enforced during search.  Results
    are deduplicated complete assignments, one dict per embedding.
    """
    injective = mode == "isomorphism"
    edges = sorted(
        query.edges, key=lambda e: (_candidate_count(index, e), e)
    )
    base: dict[str, str] = {}
    for ident in query.identities():
        if not is_variable(ident):
            base[ident] = ident

    results: dict[tuple, dict[str, str]] = {}
    idents = query.identities()

    def candidates(edge, assign) -> Iterable[EdgeTriple]:
        s = assign.get(edge.source)
        t = assign.get(edge.target)
        if s is not None and t is not None:
            probe = EdgeTriple(edge.label, s, t)
            return (probe,) if probe in index.triples else ()
        if s is not None:
            return index.by_ls.get((edge.label, s), ())
        if t is not None:
            return index.by_lt.get((edge.label, t), ())
        return index.by_label.get(edge.label, ())

    def backtrack(order, pos: int, assign: dict[str, str], used: set[str]) -> None:
        if pos == len(order):
            key = tuple(assign[i] for i in idents)
            results.setdefault(key, dict(assign))
            return
        edge = order[pos]
        for triple in candidates(edge, assign):
            added: list[str] = []
            ok = True
            for ident, val in ((edge.source, triple.source), (edge.target, triple.target)):
                bound = assign.get(ident)
                if bound is None:
                    if injective and val in used:
                        ok = False
                        break
                    assign[ident] = val
                    used.add(val)
                    added.append(ident)
                elif bound != val:
                    ok = False
                    break
            if ok:
                backtrack(order, pos + 1, assign, used)
            for ident in added:
                used.discard(assign.pop(ident))
        return

    def anchored(edge, triple: EdgeTriple) -> None:
        # force one query edge onto the new triple, match the rest
        assign = dict(base)
        used = set(assign.values()) if injective else set()
        for ident, val in ((edge.source, triple.source), (edge.target, triple.target)):
            bound = assign.get(ident)
            if bound is None:
                if injective and val in used:
                    return
                assign[ident] = val
                used.add(val)
            elif bound != val:
                return
        backtrack([e for e in edges if e != edge], 0, assign, used)

    if must_include is None:
        assign = dict(base)
        used = set(assign.values()) if injective else set()
        backtrack(edges, 0, assign, used)
    else:
        for edge in list(query.edges):
            if edge.label != must_include.label:
                continue
            if not is_variable(edge.source) and edge.source != must_include.source:
                continue
            if not is_variable(edge.target) and edge.target != must_include.target:
                continue
            anchored(edge, must_include)
    return list(results.values())


def has_embedding(
    index: TripleIndex, query: QueryGraphPattern, mode: str = "homomorphism"
) -> bool:
    """Existence check with early exit; used for selectivity measurement."""
    injective = mode == "isomorphism"
    edges = sorted(query.edges, key=lambda e: (_candidate_count(index, e), e))
    assign: dict[str, str] = {}
    for ident in query.identities():
        if not is_variable(ident):
            assign[ident] = ident
    used = set(assign.values())

    def candidates(edge):
        s = assign.get(edge.source)
        t = assign.get(edge.target)
        if s is not None and t is not None:
            probe = EdgeTriple(edge.label, s, t)
            return (probe,) if probe in index.triples else ()
        if s is not None:
            return index.by_ls.get((edge.label, s), ())
        if t is not None:
            return index.by_lt.get((edge.label, t), ())
        return index.by_label.get(edge.label, ())

    def walk(pos: int) -> bool:
        if pos == len(edges):
            return True
        edge = edges[pos]
        for triple in candidates(edge):
            added = []
            ok = True
            for ident, val in ((edge.source, triple.source), (edge.target, triple.target)):
                bound = assign.get(ident)
                if bound is None:
                    if injective and val in used:
                        ok = False
                        break
                    assign[ident] = val
                    used.add(val)
                    added.append(ident)
                elif bound != val:
                    ok = False
                    break
            if ok and walk(pos + 1):
                return True
            for ident in added:
                used.discard(assign.pop(ident))
        return False

    return walk(0)


class OracleEngine(BaseEngine):
    """Per-update re-enumeration anchored at the new edge."""

    name = "oracle"

    def __init__(self, mode: str = "homomorphism"):
        super().__init__(mode=mode)
        self.index = TripleIndex()
        self.plans: dict[str, tuple[QueryGraphPattern, tuple[str, ...]]] = {}

    def index_query(self, query: QueryGraphPattern) -> None:
        if query.id in self.plans:
            raise EngineError(f"query id {query.id!r} already indexed")
        # the shared plan supplies only the output column order, so the
        # oracle's embeddings line up with the other engines' schemas
        plan = build_plan(query)
        self.plans[query.id] = (query, plan.final_columns)

    def answer_update(self, update: Update) -> list[Notification]:
        self.stats.updates += 1
        if not self.state.append(update):
            self.stats.duplicates += 1
            return []
        self.index.add(update.triple)
        notifications: list[Notification] = []
        for qid in sorted(self.plans):
            query, columns = self.plans[qid]
            found = enumerate_embeddings(
                self.index, query, must_include=update.triple, mode=self.mode
            )
            if found:
                embeddings = frozenset(
                    tuple(a[c] for c in columns) for a in found
                )
                notifications.append(Notification(update.t, qid, embeddings))
        return self._emit(notifications)
