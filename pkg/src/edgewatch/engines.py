"""Engine protocol, shared stream-side state, and the engine registry.

Every engine exposes the same two-call surface: ``index_query`` to register
a standing query and ``answer_update`` to apply one stream update and get
back the notifications it triggered.  Duplicate triples are global no-ops
(set semantics), and timestamps must be strictly increasing.

Raw views, one per genericized edge pattern in use, are shared machinery
between the trie engine and the inverted-index baselines: they hold the
(source, target) pairs of every stream triple matching the pattern and are
backfilled from the accumulated graph when a query registers late.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import (
    EdgePattern,
    EdgeTriple,
    GraphState,
    Update,
    generic_keys,
    matches,
)
from .planner import Notification
from .views import JoinCache, JoinStats, MaterializedView


class EngineError(ValueError):
    pass


@dataclass
class EngineStats:
    updates: int = 0
    duplicates: int = 0
    notifications: int = 0
    embeddings: int = 0
    matched_nodes: int = 0
    pruned_subtrees: int = 0
    join: JoinStats = field(default_factory=JoinStats)

    @property
    def examined(self) -> int:
        return self.join.examined


class RawViewStore:
    """Genericized-pattern raw views over the stream seen so far."""

    __slots__ = ("views",)

    def __init__(self) -> None:
        self.views: dict[EdgePattern, MaterializedView] = {}

    def ensure(self, pattern: EdgePattern, state: GraphState) -> MaterializedView:
        """Get the view for a pattern, backfilling from graph history."""
        view = self.views.get(pattern)
        if view is None:
            view = MaterializedView(2)
            for triple in state.by_label.get(pattern.label, ()):
                if matches(pattern, triple):
                    view.insert((triple.source, triple.target))
            self.views[pattern] = view
        return view

    def insert_update(self, triple: EdgeTriple) -> tuple[EdgePattern, ...]:
        """Insert a fresh triple into every existing matching view."""
        keys = generic_keys(triple)
        row = (triple.source, triple.target)
        views = self.views
        for pat in keys:
            view = views.get(pat)
            if view is not None:
                view.insert(row)
        return keys


class BaseEngine:
    """Common state tracking; subclasses implement the two algorithm calls."""

    name = "base"

    def __init__(
        self,
        mode: str = "homomorphism",
        on_notify: Optional[Callable[[Notification], None]] = None,
    ):
        if mode not in ("homomorphism", "isomorphism"):
            raise EngineError(f"unknown matching mode {mode!r}")
        self.mode = mode
        self.injective = mode == "isomorphism"
        self.state = GraphState()
        self.stats = EngineStats()
        self.on_notify = on_notify

    def index_query(self, query) -> None:
        raise NotImplementedError

    def answer_update(self, update: Update) -> list[Notification]:
        raise NotImplementedError

    def _emit(self, notifications: list[Notification]) -> list[Notification]:
        self.stats.notifications += len(notifications)
        self.stats.embeddings += sum(len(n.embeddings) for n in notifications)
        if self.on_notify is not None:
            for n in notifications:
                self.on_notify(n)
        return notifications


ENGINE_NAMES = ("tric", "tric+", "inv", "inv+", "inc", "inc+", "oracle")


def make_engine(name: str, mode: str = "homomorphism", **kwargs) -> BaseEngine:
    from .inverted import IncEngine, InvEngine
    from .oracle import OracleEngine
    from .trie import TricEngine

    if name == "tric":
        return TricEngine(mode=mode, caching=False, **kwargs)
    if name == "tric+":
        return TricEngine(mode=mode, caching=True, **kwargs)
    if name == "inv":
        return InvEngine(mode=mode, caching=False, **kwargs)
    if name == "inv+":
        return InvEngine(mode=mode, caching=True, **kwargs)
    if name == "inc":
        return IncEngine(mode=mode, caching=False, **kwargs)
    if name == "inc+":
        return IncEngine(mode=mode, caching=True, **kwargs)
    if name == "oracle":
        return OracleEngine(mode=mode, **kwargs)
    raise EngineError(
        f"unknown engine {name!r}; expected one of {', '.join(ENGINE_NAMES)}"
    )
