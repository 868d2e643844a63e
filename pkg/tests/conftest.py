"""Shared fixtures: the four-query forum scenario and small run helpers."""

import re

import pytest

from edgewatch.core import Update, parse_update
from edgewatch.engines import make_engine
from edgewatch.queries import parse_query

# Lines recorded here are printed after the run, outside pytest's capture,
# so per-criterion verdicts and measured ratios stay visible on success.
SUMMARY_LINES = []


def record_line(text):
    SUMMARY_LINES.append(text)


def record_criterion(num, name, passed, detail=""):
    verdict = "PASS" if passed else "FAIL"
    line = f"criterion {num} [{name}]: {verdict}"
    if detail:
        line += f" ({detail})"
    record_line(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not SUMMARY_LINES:
        return

    # criteria execute out of numeric order (the latency gates run first);
    # display them 1..9 regardless, extras after
    def order(item):
        pos, line = item
        m = re.match(r"criterion (\d+)", line)
        return (0, int(m.group(1)), pos) if m else (1, 0, pos)

    terminalreporter.write_sep("-", "acceptance summary")
    for _, line in sorted(enumerate(SUMMARY_LINES), key=order):
        terminalreporter.write_line(line)

# Four standing queries over a forum-style graph.  Q1, Q2 and Q4 all start
# with a moderator edge, so a sharing engine can fold their plans together;
# Q3 anchors at a known comment.  Used by decomposition goldens, trie
# structure tests, and the acceptance suite.
FORUM_QUERY_TEXT = """\
Q 1
hasMod\t?a\t?b
posted\t?b\tpst1
posted\t?b\tpst2
reply\t?c\tpst2
Q 2
hasMod\t?x\t?y
Q 3
hasCreator\tcom1\t?x
posted\t?x\tpst1
containedIn\tpst1\t?y
Q 4
hasMod\t?a\t?b
posted\t?b\tpst1
containedIn\tpst1\t?c
"""


def make_updates(lines):
    """Tab or space separated 'label src tgt' strings -> timestamped updates."""
    updates = []
    for i, line in enumerate(lines):
        if "\t" not in line:
            line = "\t".join(line.split())
        updates.append(parse_update(line, i + 1, i + 1))
    return updates


def replay_engine(name, queries, updates, mode="homomorphism"):
    """Index queries, feed updates, return (engine, notification list)."""
    engine = make_engine(name, mode)
    for q in queries:
        engine.index_query(q)
    log = []
    for u in updates:
        log.extend(engine.answer_update(u))
    return engine, log


def log_lines(log):
    """Normalize notifications for cross-engine comparison."""
    lines = []
    for n in log:
        for emb in n.embeddings:
            lines.append((n.t, n.query_id, emb))
    lines.sort()
    return lines


@pytest.fixture
def forum_queries():
    blocks = FORUM_QUERY_TEXT.split("Q ")
    return [parse_query("Q " + b) for b in blocks if b.strip()]


@pytest.fixture
def single_edge_query():
    return parse_query("Q s1\nlikes\t?u\t?p\n")
