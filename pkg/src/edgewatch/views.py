"""Materialized views and the shared join kernel.

A view is an append-only set of binding tuples with a fixed arity.  All
engines funnel their joins through the row-level kernel here so that the
examined-tuple instrumentation means the same thing everywhere: every build
row, probe row, candidate match, and output row bumps the counter by one.

Joins are single-key hash joins; multi-column equality is expressed as one
hash key plus equality filters checked during the probe.  The build side is
the smaller input unless a cached index forces the choice.  ``JoinCache``
memoizes build-side indexes keyed by ``(view uid, column)``; because views
are append-only the indexes are maintained incrementally by replaying the
tail of the insertion log, and there is no eviction.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

BindingTuple = tuple  # rows are plain tuples of labels


class ViewError(ValueError):
    pass


class JoinStats:
    """Mutable examined-tuple counter shared across one engine's joins."""

    __slots__ = ("examined",)

    def __init__(self) -> None:
        self.examined = 0


_NULL_STATS = JoinStats()


class MaterializedView:
    """Append-only set of fixed-arity tuples with an insertion log.

    ``rows`` preserves insertion order (the log replayed by cached indexes);
    ``_rowset`` provides set semantics.  Views never shrink.
    """

    __slots__ = ("arity", "rows", "_rowset", "uid")
    _next_uid = 0

    def __init__(self, arity: int, rows: Optional[Iterable[BindingTuple]] = None):
        if arity < 1:
            raise ViewError(f"view arity must be >= 1, got {arity}")
        self.arity = arity
        self.rows: list[BindingTuple] = []
        self._rowset: set[BindingTuple] = set()
        MaterializedView._next_uid += 1
        self.uid = MaterializedView._next_uid
        if rows:
            for r in rows:
                self.insert(r)

    def insert(self, row: BindingTuple) -> bool:
        """Add one tuple; returns False (and changes nothing) if present."""
        if len(row) != self.arity:
            raise ViewError(f"arity mismatch: view={self.arity}, row={len(row)}")
        if row in self._rowset:
            return False
        self._rowset.add(row)
        self.rows.append(row)
        return True

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __contains__(self, row: BindingTuple) -> bool:
        return row in self._rowset

    def as_set(self) -> frozenset:
        return frozenset(self._rowset)


class JoinCache:
    """Build-side index cache keyed by ``(view uid, column)``.

    Indexes map a key value to the list of rows carrying it.  Lookups sync
    the index with the view's insertion log first, so a lookup after any
    number of inserts equals an index built from scratch.  Entries are never
    evicted.
    """

    __slots__ = ("_entries",)

    def __init__(self) -> None:
        self._entries: dict[tuple[int, int], list] = {}

    def lookup_or_build(self, view: MaterializedView, col: int) -> dict:
        if col < 0 or col >= view.arity:
            raise ViewError(f"index column {col} out of range for arity {view.arity}")
        entry = self._entries.get((view.uid, col))
        if entry is None:
            entry = [{}, 0]
            self._entries[(view.uid, col)] = entry
        index, synced = entry
        rows = view.rows
        if synced < len(rows):
            for row in rows[synced:]:
                key = row[col]
                bucket = index.get(key)
                if bucket is None:
                    index[key] = [row]
                else:
                    bucket.append(row)
            entry[1] = len(rows)
        return index

    def __len__(self) -> int:
        return len(self._entries)


def build_index(rows: Sequence[BindingTuple], col: int) -> dict:
    index: dict = {}
    for row in rows:
        key = row[col]
        bucket = index.get(key)
        if bucket is None:
            index[key] = [row]
        else:
            bucket.append(row)
    return index


def join_rows(
    left: Sequence[BindingTuple],
    right: Sequence[BindingTuple],
    lcol: int,
    rcol: int,
    stats: JoinStats = _NULL_STATS,
    extra: Sequence[tuple[int, int]] = (),
    drop: frozenset[int] | set[int] = frozenset(),
) -> list[BindingTuple]:
    """Inner hash join of two row lists on ``left[lcol] == right[rcol]``.

    Output rows are ``left_row + right_row`` with the key column, any
    ``drop`` columns, and nothing else removed from the right side.  ``extra``
    lists additional ``(left_col, right_col)`` equality pairs checked during
    the probe.  The smaller input is the build side; the choice is not
    observable in the output.
    """
    if not left or not right:
        # emptiness is an O(1) check; no tuples are examined
        return []
    removed = set(drop)
    removed.add(rcol)
    keep = [i for i in range(len(right[0])) if i not in removed]
    out: list[BindingTuple] = []
    if len(left) <= len(right):
        index = build_index(left, lcol)
        stats.examined += len(left)
        n = 0
        for rrow in right:
            n += 1
            bucket = index.get(rrow[rcol])
            if not bucket:
                continue
            for lrow in bucket:
                n += 1
                ok = True
                for lc, rc in extra:
                    if lrow[lc] != rrow[rc]:
                        ok = False
                        break
                if ok:
                    out.append(lrow + tuple(rrow[i] for i in keep))
        stats.examined += n + len(out)
    else:
        index = build_index(right, rcol)
        stats.examined += len(right)
        n = 0
        for lrow in left:
            n += 1
            bucket = index.get(lrow[lcol])
            if not bucket:
                continue
            for rrow in bucket:
                n += 1
                ok = True
                for lc, rc in extra:
                    if lrow[lc] != rrow[rc]:
                        ok = False
                        break
                if ok:
                    out.append(lrow + tuple(rrow[i] for i in keep))
        stats.examined += n + len(out)
    return out


def join_rows_cached(
    small: Sequence[BindingTuple],
    scol: int,
    view: MaterializedView,
    vcol: int,
    cache: JoinCache,
    stats: JoinStats = _NULL_STATS,
    small_side: str = "left",
    extra: Sequence[tuple[int, int]] = (),
    drop: frozenset[int] | set[int] = frozenset(),
) -> list[BindingTuple]:
    """Join a transient row list against a persistent view via a cached index.

    Only the transient side is scanned; the view contributes through its
    memoized index, which is what the caching engine variants buy.  Output
    column convention matches ``join_rows`` with the view on the side named
    by ``small_side``'s opposite.
    """
    index = cache.lookup_or_build(view, vcol)
    out: list[BindingTuple] = []
    n = 0
    if small_side == "left":
        removed = set(drop)
        removed.add(vcol)
        keep = [i for i in range(view.arity) if i not in removed]
        for lrow in small:
            n += 1
            bucket = index.get(lrow[scol])
            if not bucket:
                continue
            for rrow in bucket:
                n += 1
                ok = True
                for lc, rc in extra:
                    if lrow[lc] != rrow[rc]:
                        ok = False
                        break
                if ok:
                    out.append(lrow + tuple(rrow[i] for i in keep))
    else:
        if not small:
            return []
        removed = set(drop)
        removed.add(scol)
        keep = [i for i in range(len(small[0])) if i not in removed]
        for rrow in small:
            n += 1
            bucket = index.get(rrow[scol])
            if not bucket:
                continue
            for lrow in bucket:
                n += 1
                ok = True
                for lc, rc in extra:
                    if lrow[lc] != rrow[rc]:
                        ok = False
                        break
                if ok:
                    out.append(lrow + tuple(rrow[i] for i in keep))
    stats.examined += n + len(out)
    return out


def cartesian_rows(
    left: Sequence[BindingTuple],
    right: Sequence[BindingTuple],
    stats: JoinStats = _NULL_STATS,
) -> list[BindingTuple]:
    if not left or not right:
        return []
    out = [l + r for l in left for r in right]
    stats.examined += len(left) + len(right) + len(out)
    return out


class JoinKey:
    """Column pair for the view-level join API; ``extra`` for multi-key."""

    __slots__ = ("left_col", "right_col", "extra")

    def __init__(
        self, left_col: int, right_col: int, extra: Sequence[tuple[int, int]] = ()
    ):
        self.left_col = left_col
        self.right_col = right_col
        self.extra = tuple(extra)


def hash_join(
    left: MaterializedView,
    right: MaterializedView,
    key: JoinKey,
    stats: JoinStats = _NULL_STATS,
    cache: Optional[JoinCache] = None,
) -> MaterializedView:
    """View-level join; output arity = left.arity + right.arity - 1.

    The shared key column appears once, at its left position.  With a cache,
    the right view contributes through a memoized index and only the left
    side is scanned; the output is identical either way.
    """
    if key.left_col >= left.arity or key.right_col >= right.arity:
        raise ViewError("join key column out of range")
    if cache is None:
        rows = join_rows(
            left.rows, right.rows, key.left_col, key.right_col, stats, key.extra
        )
    else:
        rows = join_rows_cached(
            left.rows,
            key.left_col,
            right,
            key.right_col,
            cache,
            stats,
            "left",
            key.extra,
        )
    out = MaterializedView(left.arity + right.arity - 1)
    for r in rows:
        out.insert(r)
    return out


def delta_join(
    parent_delta: MaterializedView,
    child_view: MaterializedView,
    key: JoinKey,
    stats: JoinStats = _NULL_STATS,
    cache: Optional[JoinCache] = None,
) -> MaterializedView:
    """Join a delta against a full view; definitionally ``hash_join``.

    Kept as its own entry point because incremental maintenance reads better
    at call sites and because join linearity is what makes delta processing
    sound: join(A ∪ ΔA, B) = join(A, B) ∪ join(ΔA, B).
    """
    return hash_join(parent_delta, child_view, key, stats, cache)


def nested_loop_join(
    left: MaterializedView,
    right: MaterializedView,
    key: JoinKey,
) -> MaterializedView:
    """Reference join used to check the hash kernel; no instrumentation."""
    out = MaterializedView(left.arity + right.arity - 1)
    keep = [i for i in range(right.arity) if i != key.right_col]
    for lrow in left.rows:
        for rrow in right.rows:
            if lrow[key.left_col] != rrow[key.right_col]:
                continue
            if any(lrow[lc] != rrow[rc] for lc, rc in key.extra):
                continue
            out.insert(lrow + tuple(rrow[i] for i in keep))
    return out
