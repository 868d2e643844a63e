"""Core stream model: labeled edges, timestamped updates, and pattern atoms.

The data model is a directed, labeled multigraph that arrives as a stream of
edge additions.  Everything downstream (query compilation, view maintenance,
the engines) works in terms of the small value types defined here.

Conventions:

* A label is an interned string.  Vertices and edge labels share one
  namespace.
* A vertex pattern is also a plain string: tokens starting with ``?`` are
  variables, anything else is a literal vertex label.  The reserved variable
  ``?var`` is used as the anonymous variable produced by genericization.
* Timestamps are ints, strictly increasing along a stream.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

ANON_VAR = sys.intern("?var")


class StreamFormatError(ValueError):
    """A stream or query file line failed to parse."""


class StreamOrderError(ValueError):
    """An update arrived with a timestamp not greater than its predecessor."""


def intern_label(token: str) -> str:
    return sys.intern(token)


def is_variable(token: str) -> bool:
    return token.startswith("?")


class EdgeTriple(NamedTuple):
    label: str
    source: str
    target: str


class Update(NamedTuple):
    t: int
    triple: EdgeTriple


class EdgePattern(NamedTuple):
    """One query edge: a label plus a vertex pattern at each endpoint."""

    label: str
    source: str
    target: str

    def genericized(self) -> "EdgePattern":
        src = ANON_VAR if self.source.startswith("?") else self.source
        tgt = ANON_VAR if self.target.startswith("?") else self.target
        if src is self.source and tgt is self.target:
            return self
        return EdgePattern(self.label, src, tgt)


def matches(pattern: EdgePattern, triple: EdgeTriple) -> bool:
    """Decide whether a concrete triple satisfies one edge pattern.

    Labels must be equal; a literal endpoint must equal the corresponding
    vertex; a variable endpoint accepts anything.  Variable names do not
    matter here, so the result is invariant under renaming.
    """
    if pattern.label != triple.label:
        return False
    if not pattern.source.startswith("?") and pattern.source != triple.source:
        return False
    if not pattern.target.startswith("?") and pattern.target != triple.target:
        return False
    return True


def generic_keys(triple: EdgeTriple) -> tuple[EdgePattern, ...]:
    """The four genericized patterns a triple can satisfy.

    Index structures key edges by genericized pattern, so an incoming triple
    has to be probed under every combination of (literal, anonymous-variable)
    endpoints.
    """
    label, s, t = triple
    return (
        EdgePattern(label, s, t),
        EdgePattern(label, s, ANON_VAR),
        EdgePattern(label, ANON_VAR, t),
        EdgePattern(label, ANON_VAR, ANON_VAR),
    )


def parse_update(line: str, lineno: int, t: int) -> Update:
    """Parse one tab-separated ``edge_label<TAB>source<TAB>target`` line.

    ``lineno`` is the 1-based file line used in error messages; ``t`` is the
    timestamp assigned by the caller (updates are numbered in arrival order).
    """
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 3:
        raise StreamFormatError(
            f"line {lineno}: expected 3 tab-separated fields, got {len(parts)}"
        )
    label, source, target = (p.strip() for p in parts)
    if not label or not source or not target:
        raise StreamFormatError(f"line {lineno}: empty field in update")
    for tok in (label, source, target):
        if tok.startswith("?"):
            raise StreamFormatError(
                f"line {lineno}: stream tokens may not start with '?' ({tok!r})"
            )
    return Update(
        t, EdgeTriple(intern_label(label), intern_label(source), intern_label(target))
    )


def iter_stream_lines(lines: Iterable[str]) -> Iterator[Update]:
    """Yield updates from raw lines, skipping comments and blank lines.

    Timestamps are assigned from arrival order (1-based over updates, not
    file lines); parse errors cite the file line number.
    """
    t = 0
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        t += 1
        yield parse_update(raw, lineno, t)


def read_stream_file(path: str) -> list[Update]:
    with open(path, "r", encoding="utf-8") as fh:
        return list(iter_stream_lines(fh))


def write_stream_file(path: str, updates: Iterable[Update]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u in updates:
            fh.write(f"{u.triple.label}\t{u.triple.source}\t{u.triple.target}\n")


@dataclass
class GraphState:
    """The accumulated graph: a set of triples with label-keyed adjacency.

    Set semantics: re-adding an existing triple is a no-op and ``append``
    reports it.  Timestamps must be strictly increasing; a stale timestamp
    raises ``StreamOrderError`` without mutating anything.
    """

    triples: set[EdgeTriple] = field(default_factory=set)
    by_label: dict[str, list[EdgeTriple]] = field(default_factory=dict)
    last_t: int = 0

    def append(self, update: Update) -> bool:
        if update.t <= self.last_t:
            raise StreamOrderError(
                f"update timestamp {update.t} is not greater than {self.last_t}"
            )
        self.last_t = update.t
        triple = update.triple
        if triple in self.triples:
            return False
        self.triples.add(triple)
        self.by_label.setdefault(triple.label, []).append(triple)
        return True

    def __len__(self) -> int:
        return len(self.triples)
