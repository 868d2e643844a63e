"""Inverted-index baseline engines.

Both baselines index standing queries with flat inverted maps instead of
tries: ``edge_ind`` (generic edge pattern -> query ids), ``source_ind`` and
``target_ind`` (endpoint token -> generic patterns), and ``query_ind``
(query id -> compiled plan).  An update's candidate queries are the
``edge_ind`` hits whose every edge pattern currently has a nonempty raw
view; candidates are then answered per query, with no sharing of work
across queries, which is precisely what the trie engine improves on.

INV rematerializes every candidate path from its raw step views, joins the
paths in full, and keeps the result rows that bind the new edge (with
append-only streams those are exactly the new answers).  INC runs the same
pipeline in the same order, but when a candidate is touched at exactly one
step it swaps the 1-row update in for that step's view, so everything
downstream of the touched step is filtered through the update instead of
recomputed in full.  Because the swapped-in row is a subset of the view it
replaces, INC's intermediate results are pointwise subsets of INV's and its
examined-tuple count can never exceed INV's on any update.  Queries touched
at several steps (or on several paths) fall back to the INV pipeline, where
both engines do identical work.

The caching variants keep hash indexes on the raw views (via ``JoinCache``)
so the per-update rebuild of build-side tables disappears.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .core import ANON_VAR, EdgePattern, Update, generic_keys
from .engines import BaseEngine, EngineError, RawViewStore
from .planner import (
    Notification,
    QueryPlan,
    build_plan,
    compute_path_rows,
    evaluate_terms,
    matched_steps,
    new_result_rows,
)
from .queries import QueryGraphPattern
from .views import JoinCache


class InvertedIndexEngine(BaseEngine):
    """Shared indexing, candidate selection, and answering for INV and INC."""

    def __init__(self, mode: str = "homomorphism", caching: bool = False):
        super().__init__(mode=mode)
        self.caching = caching
        self.cache: Optional[JoinCache] = JoinCache() if caching else None
        self.raw = RawViewStore()
        self.edge_ind: dict[EdgePattern, set[str]] = {}
        self.source_ind: dict[str, set[EdgePattern]] = {}
        self.target_ind: dict[str, set[EdgePattern]] = {}
        self.query_ind: dict[str, QueryPlan] = {}
        self.max_path_len = 0

    def index_query(self, query: QueryGraphPattern) -> None:
        if query.id in self.query_ind:
            raise EngineError(f"query id {query.id!r} already indexed")
        plan = build_plan(query)
        for pat in plan.distinct_patterns:
            self.edge_ind.setdefault(pat, set()).add(query.id)
            self.source_ind.setdefault(pat.source, set()).add(pat)
            self.target_ind.setdefault(pat.target, set()).add(pat)
            self.raw.ensure(pat, self.state)
        self.query_ind[query.id] = plan
        self.max_path_len = max(self.max_path_len, plan.max_path_len)

    def candidates(self, key_set: frozenset[EdgePattern]) -> list[str]:
        """Queries with an edge admitting the update and no empty view."""
        hits: set[str] = set()
        for pat in key_set:
            qids = self.edge_ind.get(pat)
            if qids:
                hits.update(qids)
        views = self.raw.views
        out = []
        for qid in sorted(hits):
            plan = self.query_ind[qid]
            if all(len(views[p]) for p in plan.distinct_patterns):
                out.append(qid)
        return out

    def explore(
        self, key_set: frozenset[EdgePattern], candidate_ids: Sequence[str]
    ) -> set[EdgePattern]:
        """Bounded reachability walk over candidate patterns.

        Starting from the patterns the new edge matches, follow endpoint
        compatibility through ``source_ind``/``target_ind`` (a variable
        endpoint chains with anything, a literal only with itself or a
        variable), pruning patterns owned by no candidate query and stopping
        at the longest registered path length.  The result bounds which step
        views an update can influence.
        """
        allowed: set[EdgePattern] = set()
        for qid in candidate_ids:
            allowed.update(self.query_ind[qid].distinct_patterns)
        frontier = [p for p in key_set if p in allowed]
        reached: set[EdgePattern] = set(frontier)
        empty: set[EdgePattern] = set()
        for _ in range(self.max_path_len):
            if not frontier or len(reached) == len(allowed):
                break
            nxt: list[EdgePattern] = []
            for pat in frontier:
                if pat.target is ANON_VAR or pat.source is ANON_VAR:
                    # a variable endpoint chains with every pattern
                    for q in allowed:
                        if q not in reached:
                            reached.add(q)
                            nxt.append(q)
                    continue
                succ = self.source_ind.get(ANON_VAR, empty) | self.source_ind.get(
                    pat.target, empty
                )
                pred = self.target_ind.get(ANON_VAR, empty) | self.target_ind.get(
                    pat.source, empty
                )
                for q in (succ | pred) & allowed:
                    if q not in reached:
                        reached.add(q)
                        nxt.append(q)
            frontier = nxt
        return reached

    def _materialize(
        self,
        plan: QueryPlan,
        views,
        seed_at: Optional[tuple[int, int, Sequence[tuple]]] = None,
    ) -> Optional[list[Sequence[tuple]]]:
        """Path views in path order, pruning on the first empty one.

        ``seed_at = (path, step, rows)`` swaps the given rows in for that
        step.  Returns None when some path (or the seeded delta) comes up
        empty, which prunes the whole candidate for this update.
        """
        out: list[Sequence[tuple]] = []
        for i, info in enumerate(plan.paths):
            seeded = seed_at is not None and seed_at[0] == i
            rows = compute_path_rows(
                info,
                lambda j, _info=info: views[_info.steps[j]].rows,
                self.stats.join,
                self.cache,
                (lambda j, _info=info: views[_info.steps[j]])
                if self.cache is not None
                else None,
                seed_step=seed_at[1] if seeded else None,
                seed=seed_at[2] if seeded else None,
            )
            if not rows:
                return None
            out.append(rows)
        return out

    def _full_view_fn(self, plan: QueryPlan, views):
        # only single-edge paths have a persistent (raw) full view to cache on
        if self.cache is None:
            return None

        def fn(i: int, _plan: QueryPlan = plan):
            info = _plan.paths[i]
            if len(info.steps) == 1:
                return views[info.steps[0]]
            return None

        return fn

    def _answer(self, update: Update, seeded: bool) -> list[Notification]:
        self.stats.updates += 1
        if not self.state.append(update):
            self.stats.duplicates += 1
            return []
        triple = update.triple
        self.raw.insert_update(triple)
        key_set = frozenset(generic_keys(triple))
        cand = self.candidates(key_set)
        if not cand:
            return self._emit([])
        self.explore(key_set, cand)

        notifications: list[Notification] = []
        views = self.raw.views
        seed = [(triple.source, triple.target)]
        for qid in cand:
            plan = self.query_ind[qid]
            msteps = [matched_steps(info, key_set) for info in plan.paths]
            touched = [i for i, m in enumerate(msteps) if m]
            anchor = touched[0]
            delta_only = (
                seeded and len(touched) == 1 and len(msteps[anchor]) == 1
            )
            seed_at = (anchor, msteps[anchor][0], seed) if delta_only else None
            fulls = self._materialize(plan, views, seed_at)
            if fulls is None:
                continue
            result = evaluate_terms(
                plan,
                lambda i: fulls[i],
                {anchor: fulls[anchor]},
                self.stats.join,
                injective=self.injective,
                cache=self.cache,
                full_view=self._full_view_fn(plan, views),
            )
            if delta_only:
                # every row binds the new edge by construction
                new = result
            else:
                new = new_result_rows(plan, result, triple, self.stats.join)
            if new:
                notifications.append(Notification(update.t, qid, frozenset(new)))
        return self._emit(notifications)


class InvEngine(InvertedIndexEngine):
    """Recompute-everything baseline."""

    def __init__(self, mode: str = "homomorphism", caching: bool = False):
        super().__init__(mode=mode, caching=caching)
        self.name = "inv+" if caching else "inv"

    def answer_update(self, update: Update) -> list[Notification]:
        return self._answer(update, seeded=False)


class IncEngine(InvertedIndexEngine):
    """Update-seeded variant: downstream joins are filtered by the new edge."""

    def __init__(self, mode: str = "homomorphism", caching: bool = False):
        super().__init__(mode=mode, caching=caching)
        self.name = "inc+" if caching else "inc"

    def answer_update(self, update: Update) -> list[Notification]:
        return self._answer(update, seeded=True)
