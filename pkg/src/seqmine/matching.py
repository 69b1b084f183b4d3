"""Occurrence search: depth-first matcher with gap and miss budgets.

An occurrence maps every pattern event to a distinct sequence event in
order.  The total number of skipped events between the first and last
matched event is bounded by the pattern's gap budget, single disagreeing
values are tolerated up to the miss budget (at most one per event), and
per start index only the first embedding in depth-first order is kept.
"""

from __future__ import annotations

import itertools

from .model import EMPTY, EventDataset, Pattern

Sequence = tuple[tuple[int, ...], ...]


class OracleScaleError(ValueError):
    """The exhaustive oracle refuses inputs beyond its size guard."""


class OccurrenceError(ValueError):
    """An occurrence violates its structural invariants."""


class Occurrence:
    """One embedding of a pattern into a sequence.

    marks are the (event, attribute) slots whose values the pattern
    reproduces; misses are slots the pattern claims but mismatches.
    claims is their union: every slot this occurrence consumes.
    """

    __slots__ = ("matched", "misses", "marks", "claims")

    def __init__(
        self,
        matched: tuple[int, ...],
        misses: tuple[tuple[int, int], ...],
        marks: frozenset[tuple[int, int]],
    ) -> None:
        self.matched = matched
        self.misses = misses
        self.marks = marks
        self.claims = marks.union(misses)

    @property
    def start(self) -> int:
        return self.matched[0]

    @property
    def gap_count(self) -> int:
        return self.matched[-1] - self.matched[0] + 1 - len(self.matched)

    def gap_events(self) -> list[int]:
        present = set(self.matched)
        return [
            e for e in range(self.matched[0], self.matched[-1] + 1) if e not in present
        ]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Occurrence)
            and self.matched == other.matched
            and self.misses == other.misses
            and self.marks == other.marks
        )

    def __hash__(self) -> int:
        return hash((self.matched, self.misses))

    def __repr__(self) -> str:
        return f"Occurrence(matched={self.matched}, misses={self.misses})"


def _match_event(
    pattern_event: tuple[int, ...], seq_event: tuple[int, ...], event_index: int
) -> tuple[list[tuple[int, int]], list[tuple[int, int]]] | None:
    """Match one pattern event at one position: (marks, misses) or None.

    At most one miss per event; empty pattern slots never mark or miss.
    """
    marks: list[tuple[int, int]] = []
    misses: list[tuple[int, int]] = []
    for k, want in enumerate(pattern_event):
        if want == EMPTY:
            continue
        if want == seq_event[k]:
            marks.append((event_index, k))
        else:
            if misses:
                return None
            misses.append((event_index, k))
    return marks, misses


def _dfs(
    sequence: Sequence,
    events: tuple[tuple[int, ...], ...],
    si: int,
    pi: int,
    gaps_left: int,
    misses_left: int,
):
    """First embedding of events[pi:] with events[pi] anchored at si."""
    if len(sequence) - si < len(events) - pi:
        return None
    hit = _match_event(events[pi], sequence[si], si)
    if hit is None:
        return None
    marks, misses = hit
    if len(misses) > misses_left:
        return None
    if pi == len(events) - 1:
        return [si], misses, marks
    for gap in range(gaps_left + 1):
        rest = _dfs(
            sequence, events, si + 1 + gap, pi + 1, gaps_left - gap,
            misses_left - len(misses),
        )
        if rest is not None:
            r_matched, r_misses, r_marks = rest
            return [si] + r_matched, misses + r_misses, marks + r_marks
    return None


def search_occurrences(
    pattern: Pattern,
    sequence: Sequence,
    max_misses: int | None = None,
    anchors=None,
) -> list[Occurrence]:
    """All occurrences, one per feasible start index, in start order."""
    budget = pattern.max_misses if max_misses is None else min(max_misses, pattern.max_misses)
    if anchors is None:
        anchors = range(len(sequence))
    out: list[Occurrence] = []
    events = pattern.events
    max_gaps = pattern.max_gaps
    for start in anchors:
        found = _dfs(sequence, events, start, 0, max_gaps, budget)
        if found is not None:
            matched, misses, marks = found
            out.append(Occurrence(tuple(matched), tuple(misses), frozenset(marks)))
    return out


def brute_force_occurrences(
    pattern: Pattern, sequence: Sequence, max_misses: int | None = None
) -> list[Occurrence]:
    """Exhaustive reference matcher, usable only on tiny inputs.

    Enumerates every strictly increasing event assignment in lexicographic
    order and keeps, per start index, the first one satisfying the budgets.
    """
    if len(sequence) > 12 or pattern.length > 4:
        raise OracleScaleError(
            "exhaustive matcher accepts at most 12 events and 4 pattern events"
        )
    budget = pattern.max_misses if max_misses is None else min(max_misses, pattern.max_misses)
    n, m = len(sequence), pattern.length
    out: list[Occurrence] = []
    for start in range(n):
        best = None
        for tail in itertools.combinations(range(start + 1, n), m - 1):
            assignment = (start,) + tail
            if assignment[-1] - assignment[0] + 1 - m > pattern.max_gaps:
                continue
            marks: list[tuple[int, int]] = []
            misses: list[tuple[int, int]] = []
            ok = True
            for pi, si in enumerate(assignment):
                hit = _match_event(pattern.events[pi], sequence[si], si)
                if hit is None:
                    ok = False
                    break
                marks.extend(hit[0])
                misses.extend(hit[1])
                if len(misses) > budget:
                    ok = False
                    break
            if ok:
                best = Occurrence(assignment, tuple(misses), frozenset(marks))
                break
        if best is not None:
            out.append(best)
    return out


def validate_occurrence(
    pattern: Pattern,
    sequence: Sequence,
    occ: Occurrence,
    max_misses: int | None = None,
) -> None:
    """Recheck every occurrence invariant from scratch; raise on failure."""
    budget = pattern.max_misses if max_misses is None else min(max_misses, pattern.max_misses)
    m = pattern.length
    if len(occ.matched) != m:
        raise OccurrenceError("assignment length differs from pattern length")
    if any(b <= a for a, b in zip(occ.matched, occ.matched[1:])):
        raise OccurrenceError("assignment is not strictly increasing")
    if occ.matched[0] < 0 or occ.matched[-1] >= len(sequence):
        raise OccurrenceError("assignment leaves the sequence")
    if occ.gap_count > pattern.max_gaps:
        raise OccurrenceError("gap budget exceeded")
    if len(occ.misses) > budget:
        raise OccurrenceError("miss budget exceeded")
    per_event: dict[int, int] = {}
    for e, _k in occ.misses:
        per_event[e] = per_event.get(e, 0) + 1
        if per_event[e] > 1:
            raise OccurrenceError("more than one miss on a single event")
    marks: set[tuple[int, int]] = set()
    misses: set[tuple[int, int]] = set()
    for pi, si in enumerate(occ.matched):
        for k, want in enumerate(pattern.events[pi]):
            if want == EMPTY:
                continue
            if want == sequence[si][k]:
                marks.add((si, k))
            else:
                misses.add((si, k))
    if marks != occ.marks:
        raise OccurrenceError("recorded marks disagree with pattern and sequence")
    if misses != set(occ.misses):
        raise OccurrenceError("recorded misses disagree with pattern and sequence")
    if occ.claims != marks | misses:
        raise OccurrenceError("claims are not the union of marks and misses")


class DatasetMatcher:
    """Postings-accelerated occurrence search over a whole dataset, with caching.

    Search results are pure functions of (pattern, miss setting), so the
    cache never invalidates.
    """

    def __init__(self, dataset: EventDataset, allow_misses: bool = True) -> None:
        self.dataset = dataset
        self.allow_misses = allow_misses
        self._postings: list[dict[tuple[int, int], list[int]]] = []
        for seq in dataset.sequences:
            table: dict[tuple[int, int], list[int]] = {}
            for e, ev in enumerate(seq):
                for k, v in enumerate(ev):
                    table.setdefault((k, v), []).append(e)
            self._postings.append(table)
        self._occ_cache: dict[tuple, dict[int, list[Occurrence]]] = {}
        self._support_cache: dict[tuple, int] = {}

    def _anchors(self, pattern: Pattern, seq_idx: int, budget: int):
        """Start indices that can match the first pattern event."""
        first = pattern.events[0]
        slots = [(k, v) for k, v in enumerate(first) if v != EMPTY]
        table = self._postings[seq_idx]
        if budget <= 0:
            lists = [table.get(slot) for slot in slots]
            if any(lst is None for lst in lists):
                return ()
            lists.sort(key=len)
            base = lists[0]
            if len(lists) == 1:
                return base
            rest = [set(lst) for lst in lists[1:]]
            return [e for e in base if all(e in s for s in rest)]
        if len(slots) == 1:
            return range(len(self.dataset.sequences[seq_idx]))
        # one miss allowed somewhere: any event matching all slots but one
        anchors: set[int] = set()
        sets = [set(table.get(slot, ())) for slot in slots]
        for skip in range(len(slots)):
            inter: set[int] | None = None
            for j, s in enumerate(sets):
                if j == skip:
                    continue
                inter = s if inter is None else inter & s
                if not inter:
                    break
            if inter:
                anchors.update(inter)
        return sorted(anchors)

    def occurrences(self, pattern: Pattern) -> dict[int, list[Occurrence]]:
        """Occurrence lists per sequence index, omitting empty sequences."""
        key = pattern.events
        cached = self._occ_cache.get(key)
        if cached is not None:
            return cached
        budget = pattern.max_misses if self.allow_misses else 0
        found: dict[int, list[Occurrence]] = {}
        for i, seq in enumerate(self.dataset.sequences):
            anchors = self._anchors(pattern, i, budget)
            if not anchors:
                continue
            occs = search_occurrences(pattern, seq, max_misses=budget, anchors=anchors)
            if occs:
                found[i] = occs
        self._occ_cache[key] = found
        self._support_cache[key] = sum(len(v) for v in found.values())
        return found

    def support(self, pattern: Pattern) -> int:
        key = pattern.events
        if key not in self._support_cache:
            self.occurrences(pattern)
        return self._support_cache[key]
