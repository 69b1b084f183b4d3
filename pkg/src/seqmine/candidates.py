"""Candidate construction: pairwise combination and gap-event variations.

Two patterns combine at every order-preserving alignment of their event
lists, where aligned events overlay cell-wise.  A cell conflict forks the
candidate into two, each keeping one parent's value; the dropped values
would have to be absorbed as misses, so candidates whose conflict count
exceeds their own miss budget are discarded.
"""

from __future__ import annotations

from collections import Counter

from .model import EMPTY, Pattern, PatternError


def _alignments(n1: int, n2: int):
    """All order-preserving merges of ranges(n1) and range(n2).

    Yields column lists; a column pairs an event index of each parent or
    leaves one side out.  No column is empty, so merged patterns never
    contain an all-empty event.
    """
    stack = [(0, 0, [])]
    while stack:
        i, j, acc = stack.pop()
        if i == n1 and j == n2:
            yield acc
            continue
        # pushed in reverse so both-consumed columns are explored first
        if i < n1 and j < n2:
            stack.append((i + 1, j + 1, acc + [(i, j)]))
        if j < n2:
            stack.append((i, j + 1, acc + [(None, j)]))
        if i < n1:
            stack.append((i + 1, j, acc + [(i, None)]))
    return


def _parent_spread_ok(columns: list[tuple[int | None, int | None]]) -> bool:
    """Each parent's events may be stretched by at most its own gap budget."""
    for side in (0, 1):
        positions = [c for c, col in enumerate(columns) if col[side] is not None]
        count = len(positions)
        if positions[-1] - positions[0] + 1 - count > count - 1:
            return False
    return True


def combine(p1: Pattern, p2: Pattern) -> set[Pattern]:
    """Every valid merged pattern of p1 and p2 across all alignments."""
    if p1.arity != p2.arity:
        raise PatternError("cannot combine patterns of different arity")
    arity = p1.arity
    out: set[Pattern] = set()
    for columns in _alignments(p1.length, p2.length):
        if not _parent_spread_ok(columns):
            continue
        merged: list[list[int]] = []
        conflict_cells: list[tuple[int, int]] = []
        for c, (i, j) in enumerate(columns):
            ev1 = p1.events[i] if i is not None else None
            ev2 = p2.events[j] if j is not None else None
            row = []
            for k in range(arity):
                a = ev1[k] if ev1 is not None else EMPTY
                b = ev2[k] if ev2 is not None else EMPTY
                if a != EMPTY and b != EMPTY and a != b:
                    conflict_cells.append((c, k))
                    row.append(a)  # placeholder, rewritten per variant
                else:
                    row.append(a if a != EMPTY else b)
            merged.append(row)
        if not conflict_cells:
            out.add(Pattern(tuple(tuple(row) for row in merged)))
            continue
        events_in_conflict = {c for c, _k in conflict_cells}
        if len(events_in_conflict) != len(conflict_cells):
            continue  # two conflicting cells in one event can never be matched
        for keep_first in (True, False):
            rows = [list(row) for row in merged]
            for c, k in conflict_cells:
                i, j = columns[c]
                rows[c][k] = p1.events[i][k] if keep_first else p2.events[j][k]
            cand = Pattern(tuple(tuple(row) for row in rows))
            if len(conflict_cells) <= cand.max_misses:
                out.add(cand)
    return out


def generate_candidates(
    support_of,
    pairs,
    exclude=frozenset(),
    extra: dict[Pattern, int] | None = None,
) -> list[tuple[Pattern, int]]:
    """Build and order the candidate pool from pattern pairs.

    Estimated support of a candidate is the smaller parent support,
    taking the most optimistic estimate when several pairs produce the
    same candidate.  `extra` maps pre-built candidates (variations) to
    their own estimates and joins the pool under the same ordering.
    Candidates are ordered by falling estimate, falling event count,
    then canonically.
    """
    estimates: dict[Pattern, int] = {}
    for a, b in pairs:
        est = min(support_of(a), support_of(b))
        for cand in combine(a, b):
            if cand.size < 2 or cand in exclude:
                continue
            prev = estimates.get(cand)
            if prev is None or est > prev:
                estimates[cand] = est
    if extra:
        for cand, est in extra.items():
            if cand.size < 2 or cand in exclude:
                continue
            prev = estimates.get(cand)
            if prev is None or est > prev:
                estimates[cand] = est
    ordered = sorted(
        estimates.items(), key=lambda item: (-item[1], -item[0].length, item[0].events)
    )
    return ordered


def collect_gap_values(
    pattern: Pattern,
    usages: list[tuple[tuple[tuple[int, ...], ...], "object"]],
) -> tuple[int, Counter]:
    """Count, per usage, the values seen in the gaps of a pattern's covers.

    usages pairs each covering sequence with the occurrence accepted in it.
    Returns the usage count and a counter over (gap slot, attribute, value)
    with at most one count per usage.
    """
    counts: Counter = Counter()
    for sequence, occ in usages:
        seen: set[tuple[int, int, int]] = set()
        for slot_idx in range(len(occ.matched) - 1):
            lo, hi = occ.matched[slot_idx], occ.matched[slot_idx + 1]
            for e in range(lo + 1, hi):
                for k, v in enumerate(sequence[e]):
                    seen.add((slot_idx, k, v))
        counts.update(seen)
    return len(usages), counts


def variations(
    pattern: Pattern,
    usage_count: int,
    gap_counts: Counter,
    threshold: float = 0.5,
) -> set[Pattern]:
    """Insert a frequent gap value as a new single-value event.

    For each gap slot and attribute, the most frequent value is inserted
    when it appears in at least `threshold` of the pattern's usages.
    """
    if usage_count == 0:
        return set()
    out: set[Pattern] = set()
    best: dict[tuple[int, int], tuple[int, int]] = {}
    for (slot_idx, k, v), c in gap_counts.items():
        cur = best.get((slot_idx, k))
        if cur is None or c > cur[0] or (c == cur[0] and v < cur[1]):
            best[(slot_idx, k)] = (c, v)
    arity = pattern.arity
    for (slot_idx, k), (c, v) in best.items():
        if c >= threshold * usage_count:
            row = [EMPTY] * arity
            row[k] = v
            events = (
                pattern.events[: slot_idx + 1]
                + ((tuple(row)),)
                + pattern.events[slot_idx + 1 :]
            )
            out.add(Pattern(events))
    return out
