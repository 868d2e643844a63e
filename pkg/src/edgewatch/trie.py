"""Trie-clustered continuous matching engine.

Standing queries are compiled to covering paths and the paths are folded
into a forest of tries keyed by genericized edge patterns, so structurally
identical path prefixes across queries collapse into one trie branch with
one materialized view.  An update then does incremental work proportional to
the distinct affected branches instead of to the number of registered
queries:

1. the update's four generic keys select the trie nodes whose pattern admits
   it (``edge_ind`` keeps the affected-trie mapping, a per-pattern node list
   makes the lookup direct);
2. each affected node seeds a delta, joining the singleton new edge against
   its parent's view (or taking the edge itself at a root);
3. deltas cascade down to children through the children's raw views,
   pruning any subtree whose delta comes back empty;
4. queries terminal-tagged at nodes that gained rows are re-evaluated by
   joining the touched paths' deltas against the other paths' views.

The caching variant keeps join-side hash indexes on the persistent views
(raw, node, terminal) so repeated probes skip the per-update rebuild.
"""

from __future__ import annotations

from typing import Optional

from .core import EdgePattern, Update, generic_keys
from .engines import BaseEngine, EngineError, RawViewStore
from .planner import (
    Notification,
    QueryPlan,
    build_plan,
    evaluate_terms,
)
from .queries import QueryGraphPattern
from .views import (
    JoinCache,
    MaterializedView,
    join_rows,
    join_rows_cached,
)


class TrieNode:
    __slots__ = (
        "pattern",
        "parent",
        "children",
        "child_by_pattern",
        "view",
        "query_ids",
        "depth",
        "uid",
    )

    def __init__(
        self,
        pattern: EdgePattern,
        parent: Optional["TrieNode"],
        view: MaterializedView,
        uid: int,
    ):
        self.pattern = pattern
        self.parent = parent
        self.children: list[TrieNode] = []
        self.child_by_pattern: dict[EdgePattern, TrieNode] = {}
        self.view = view
        self.query_ids: set[str] = set()  # queries whose path ends here
        self.depth = 0 if parent is None else parent.depth + 1
        self.uid = uid

    @property
    def arity(self) -> int:
        return self.depth + 2

    def root(self) -> "TrieNode":
        node = self
        while node.parent is not None:
            node = node.parent
        return node


class QueryEntry:
    __slots__ = ("plan", "terminals")

    def __init__(self, plan: QueryPlan, terminals: list[TrieNode]):
        self.plan = plan
        self.terminals = terminals


class TrieForest:
    """The shared index: tries plus the maps that route updates into them."""

    def __init__(self) -> None:
        self.root_ind: dict[EdgePattern, TrieNode] = {}
        self.edge_ind: dict[EdgePattern, set[TrieNode]] = {}
        self.query_ind: dict[str, QueryEntry] = {}
        self.pattern_nodes: dict[EdgePattern, list[TrieNode]] = {}
        self.node_count = 0

    def nodes(self) -> list[TrieNode]:
        out = []
        stack = list(self.root_ind.values())
        while stack:
            n = stack.pop()
            out.append(n)
            stack.extend(n.children)
        return out

    def signature(self):
        """Structural fingerprint: shape, patterns, and query tags."""

        def node_sig(n: TrieNode):
            kids = tuple(sorted(node_sig(c) for c in n.children))
            return (n.pattern, tuple(sorted(n.query_ids)), kids)

        return tuple(sorted(node_sig(r) for r in self.root_ind.values()))


class TricEngine(BaseEngine):
    def __init__(self, mode: str = "homomorphism", caching: bool = False, prune: bool = True):
        super().__init__(mode=mode)
        self.name = "tric+" if caching else "tric"
        self.caching = caching
        self.prune = prune
        self.forest = TrieForest()
        self.raw = RawViewStore()
        self.cache: Optional[JoinCache] = JoinCache() if caching else None

    # -- indexing ---------------------------------------------------------

    def index_query(self, query: QueryGraphPattern) -> None:
        forest = self.forest
        if query.id in forest.query_ind:
            raise EngineError(f"query id {query.id!r} already indexed")
        plan = build_plan(query)
        terminals: list[TrieNode] = []
        for info in plan.paths:
            node = self._ensure_root(info.steps[0])
            for pat in info.steps[1:]:
                node = self._ensure_child(node, pat)
            terminals.append(node)
            root = terminals[-1].root()
            for pat in info.steps:
                forest.edge_ind.setdefault(pat, set()).add(root)
        for node in terminals:
            node.query_ids.add(query.id)
        forest.query_ind[query.id] = QueryEntry(plan, terminals)

    def _ensure_root(self, pattern: EdgePattern) -> TrieNode:
        forest = self.forest
        root = forest.root_ind.get(pattern)
        if root is None:
            # the root's view is the raw view itself: same arity, same rows
            view = self.raw.ensure(pattern, self.state)
            forest.node_count += 1
            root = TrieNode(pattern, None, view, forest.node_count)
            forest.root_ind[pattern] = root
            forest.pattern_nodes.setdefault(pattern, []).append(root)
        return root

    def _ensure_child(self, parent: TrieNode, pattern: EdgePattern) -> TrieNode:
        forest = self.forest
        child = parent.child_by_pattern.get(pattern)
        if child is None:
            raw = self.raw.ensure(pattern, self.state)
            view = MaterializedView(parent.arity + 1)
            rows = join_rows(
                parent.view.rows, raw.rows, parent.arity - 1, 0, self.stats.join
            )
            for r in rows:
                view.insert(r)
            forest.node_count += 1
            child = TrieNode(pattern, parent, view, forest.node_count)
            parent.children.append(child)
            parent.child_by_pattern[pattern] = child
            forest.pattern_nodes.setdefault(pattern, []).append(child)
        return child

    # -- answering --------------------------------------------------------

    def answer_update(self, update: Update) -> list[Notification]:
        self.stats.updates += 1
        if not self.state.append(update):
            self.stats.duplicates += 1
            return []
        triple = update.triple
        self.raw.insert_update(triple)
        seed_row = (triple.source, triple.target)

        node_deltas: dict[TrieNode, list[tuple]] = {}
        pattern_nodes = self.forest.pattern_nodes
        for pat in generic_keys(triple):
            nodes = pattern_nodes.get(pat)
            if not nodes:
                continue
            for node in nodes:
                self.stats.matched_nodes += 1
                if node.parent is None:
                    new_rows = [seed_row]
                    # raw view (== root view) already holds the row
                else:
                    parent = node.parent
                    if self.cache is not None:
                        contrib = join_rows_cached(
                            [seed_row],
                            0,
                            parent.view,
                            parent.arity - 1,
                            self.cache,
                            self.stats.join,
                            "right",
                        )
                    else:
                        contrib = join_rows(
                            parent.view.rows,
                            [seed_row],
                            parent.arity - 1,
                            0,
                            self.stats.join,
                        )
                    view = node.view
                    new_rows = [r for r in contrib if view.insert(r)]
                if new_rows:
                    node_deltas.setdefault(node, []).extend(new_rows)
                    self._cascade(node, new_rows, node_deltas)
                elif node.parent is not None:
                    self.stats.pruned_subtrees += 1

        notifications = self._notify(update.t, node_deltas)
        return self._emit(notifications)

    def _cascade(
        self,
        node: TrieNode,
        rows: list[tuple],
        node_deltas: dict[TrieNode, list[tuple]],
    ) -> None:
        last = node.arity - 1
        for child in node.children:
            raw = self.raw.views[child.pattern]
            if self.cache is not None:
                out = join_rows_cached(
                    rows, last, raw, 0, self.cache, self.stats.join, "left"
                )
            else:
                out = join_rows(rows, raw.rows, last, 0, self.stats.join)
            if out:
                view = child.view
                new_rows = [r for r in out if view.insert(r)]
                if new_rows:
                    node_deltas.setdefault(child, []).extend(new_rows)
                    self._cascade(child, new_rows, node_deltas)
                    continue
            self.stats.pruned_subtrees += 1
            if not self.prune:
                self._cascade(child, [], node_deltas)

    def _notify(
        self, t: int, node_deltas: dict[TrieNode, list[tuple]]
    ) -> list[Notification]:
        affected: set[str] = set()
        for node in node_deltas:
            affected.update(node.query_ids)
        notifications: list[Notification] = []
        for qid in sorted(affected):
            entry = self.forest.query_ind[qid]
            deltas = {
                i: node_deltas[n]
                for i, n in enumerate(entry.terminals)
                if n in node_deltas
            }
            embeddings = self.final_join(qid, deltas)
            if embeddings:
                notifications.append(Notification(t, qid, frozenset(embeddings)))
        return notifications

    def affected_queries(self, node_deltas: dict[TrieNode, list[tuple]]) -> set[str]:
        out: set[str] = set()
        for node in node_deltas:
            out.update(node.query_ids)
        return out

    def final_join(self, query_id: str, deltas: dict[int, list[tuple]]) -> set[tuple]:
        """Join touched-path deltas against the other terminal views."""
        entry = self.forest.query_ind.get(query_id)
        if entry is None:
            raise EngineError(f"query id {query_id!r} not indexed")
        terminals = entry.terminals
        return evaluate_terms(
            entry.plan,
            lambda i: terminals[i].view.rows,
            deltas,
            self.stats.join,
            injective=self.injective,
            cache=self.cache,
            full_view=(lambda i: terminals[i].view) if self.cache is not None else None,
        )
