"""Query graphs and their decomposition into covering paths.

A query is a small connected directed graph whose vertices are literals or
variables.  Engines never match the query graph directly; they match a set of
*covering paths*, directed walks that together visit every query edge.  The
decomposition is deterministic so that every engine (and every run) sees the
same paths in the same order, which in turn fixes the output column order of
final results.

Path extraction is greedy: walks start preferentially from source vertices
(in-degree zero), always extend while an outgoing edge leads to a vertex not
yet on the walk, may pass through already-covered edges to reach uncovered
ones, and may take one final closing step back into the walk (which is how a
cycle becomes a single path).  Walks that cover no new edge are discarded,
and any path that is a contiguous sub-path of another is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import ANON_VAR, EdgePattern, StreamFormatError, intern_label, is_variable


class QueryFormatError(ValueError):
    """A query block failed to parse or validate."""


@dataclass(frozen=True)
class QueryGraphPattern:
    id: str
    edges: tuple[EdgePattern, ...]

    def identities(self) -> list[str]:
        """Distinct vertex identities in first-appearance order."""
        seen: list[str] = []
        for e in self.edges:
            if e.source not in seen:
                seen.append(e.source)
            if e.target not in seen:
                seen.append(e.target)
        return seen


@dataclass(frozen=True)
class CoveringPath:
    """A directed walk through the query graph.

    ``positions`` has one entry per walk position (edges + 1); entry k is the
    vertex identity bound at that position.  ``edge_indices`` point back into
    the owning query's edge tuple.
    """

    edges: tuple[EdgePattern, ...]
    positions: tuple[str, ...]
    edge_indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class PathDecomposition:
    query: QueryGraphPattern
    paths: tuple[CoveringPath, ...]


def parse_query(text: str | Sequence[str]) -> QueryGraphPattern:
    """Parse one ``Q <id>`` block followed by tab-separated edge lines."""
    lines = text.splitlines() if isinstance(text, str) else list(text)
    header = None
    edges: list[EdgePattern] = []
    seen: set[EdgePattern] = set()
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if header is None:
            parts = stripped.split()
            if len(parts) != 2 or parts[0] != "Q":
                raise QueryFormatError(
                    f"line {lineno}: expected query header 'Q <id>', got {stripped!r}"
                )
            header = parts[1]
            continue
        fields = raw.rstrip("\n").split("\t")
        if len(fields) != 3:
            raise QueryFormatError(
                f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}"
            )
        label, src, tgt = (f.strip() for f in fields)
        if not label or not src or not tgt:
            raise QueryFormatError(f"line {lineno}: empty field in edge")
        if label.startswith("?"):
            raise QueryFormatError(f"line {lineno}: edge label may not be a variable")
        for tok in (src, tgt):
            if tok.startswith("?") and len(tok) < 2:
                raise QueryFormatError(f"line {lineno}: empty variable name")
        edge = EdgePattern(intern_label(label), intern_label(src), intern_label(tgt))
        if edge not in seen:
            seen.add(edge)
            edges.append(edge)
    if header is None:
        raise QueryFormatError("missing 'Q <id>' header")
    if not edges:
        raise QueryFormatError(f"query {header}: no edges")
    query = QueryGraphPattern(header, tuple(edges))
    _check_connected(query)
    return query


def parse_query_file(text: str) -> list[QueryGraphPattern]:
    """Parse a file of consecutive query blocks; ids must be unique."""
    blocks: list[list[str]] = []
    for raw in text.splitlines():
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("Q ") or stripped == "Q":
            blocks.append([raw])
        elif blocks:
            blocks[-1].append(raw)
        else:
            raise QueryFormatError(f"edge line before any query header: {stripped!r}")
    queries = [parse_query(b) for b in blocks]
    ids = [q.id for q in queries]
    if len(set(ids)) != len(ids):
        dup = next(i for i in ids if ids.count(i) > 1)
        raise QueryFormatError(f"duplicate query id {dup!r}")
    return queries


def read_query_file(path: str) -> list[QueryGraphPattern]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_query_file(fh.read())


def format_query(query: QueryGraphPattern) -> str:
    lines = [f"Q {query.id}"]
    lines.extend(f"{e.label}\t{e.source}\t{e.target}" for e in query.edges)
    return "\n".join(lines) + "\n"


def _check_connected(query: QueryGraphPattern) -> None:
    idents = query.identities()
    adj: dict[str, set[str]] = {v: set() for v in idents}
    for e in query.edges:
        adj[e.source].add(e.target)
        adj[e.target].add(e.source)
    seen = {idents[0]}
    frontier = [idents[0]]
    while frontier:
        v = frontier.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    if len(seen) != len(idents):
        missing = sorted(set(idents) - seen)
        raise QueryFormatError(
            f"query {query.id}: not connected (unreached: {', '.join(missing)})"
        )


def _vertex_order(idents: Iterable[str]) -> list[str]:
    # literals sorted lexicographically, then variables sorted by name
    lits = sorted(v for v in idents if not is_variable(v))
    vars_ = sorted(v for v in idents if is_variable(v))
    return lits + vars_


def covering_paths(query: QueryGraphPattern) -> PathDecomposition:
    """Decompose a query graph into a deterministic list of covering paths."""
    edges = query.edges
    out_edges: dict[str, list[int]] = {}
    in_deg: dict[str, int] = {}
    for v in query.identities():
        out_edges[v] = []
        in_deg[v] = 0
    for i, e in enumerate(edges):
        out_edges[e.source].append(i)
        in_deg[e.target] += 1
    for v in out_edges:
        out_edges[v].sort(key=lambda i: (edges[i].label, edges[i].target, i))

    visited: set[int] = set()
    raw_paths: list[tuple[tuple[int, ...], tuple[str, ...]]] = []

    def walk(start: str) -> tuple[tuple[int, ...], tuple[str, ...]] | None:
        on_walk = {start}
        pos = [start]
        taken: list[int] = []
        covered_new = False
        cur = start
        while True:
            step = None
            fallback = None
            closing = None
            for i in out_edges[cur]:
                tgt = edges[i].target
                if tgt not in on_walk:
                    if i not in visited:
                        step = i
                        break
                    if fallback is None:
                        fallback = i
                elif closing is None and i not in visited:
                    closing = i
            if step is None and closing is not None:
                # no unvisited extension; an unvisited closing step back into
                # the walk beats a visited pass-through, and ends the walk
                taken.append(closing)
                pos.append(edges[closing].target)
                visited.add(closing)
                covered_new = True
                break
            if step is None:
                step = fallback
            if step is None:
                break
            taken.append(step)
            pos.append(edges[step].target)
            if step not in visited:
                visited.add(step)
                covered_new = True
            cur = edges[step].target
            on_walk.add(cur)
        if not covered_new:
            return None
        return tuple(taken), tuple(pos)

    order = _vertex_order(out_edges)
    sources = [v for v in order if in_deg[v] == 0]
    for start in sources + order:
        while out_edges[start]:
            w = walk(start)
            if w is None:
                break
            raw_paths.append(w)

    kept: list[tuple[tuple[int, ...], tuple[str, ...]]] = []
    for i, (eidx, pos) in enumerate(raw_paths):
        sub = False
        for j, (other, _) in enumerate(raw_paths):
            if i == j or len(eidx) > len(other):
                continue
            if len(eidx) == len(other) and (eidx != other or i < j):
                continue
            if any(
                other[k : k + len(eidx)] == eidx
                for k in range(len(other) - len(eidx) + 1)
            ):
                sub = True
                break
        if not sub:
            kept.append((eidx, pos))

    paths = tuple(
        CoveringPath(tuple(edges[i] for i in eidx), pos, eidx) for eidx, pos in kept
    )
    return PathDecomposition(query, paths)


def intersections_of(
    decomp: PathDecomposition,
) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """All pairs of path positions that must bind the same value.

    Each element pairs two ``(path_index, position)`` coordinates whose
    vertex identities are equal, covering both cross-path sharing and
    repeated identities within a single path.  Pairs are emitted in sorted
    order, each unordered pair once.
    """
    by_ident: dict[str, list[tuple[int, int]]] = {}
    for pi, path in enumerate(decomp.paths):
        for pos, ident in enumerate(path.positions):
            by_ident.setdefault(ident, []).append((pi, pos))
    pairs: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for coords in by_ident.values():
        for a in range(len(coords) - 1):
            for b in range(a + 1, len(coords)):
                pairs.append((coords[a], coords[b]))
    pairs.sort()
    return pairs


def genericized_steps(path: CoveringPath) -> tuple[EdgePattern, ...]:
    return tuple(e.genericized() for e in path.edges)
