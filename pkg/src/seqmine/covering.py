"""Greedy covering of sequences and the data-side description length.

Patterns are tried largest first; an occurrence is kept only when the
slots it claims (marks plus misses) are all still free, so every value
of a sequence is encoded exactly once.  Leftover slots fall to the
singleton codes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .codetable import CodeTable, UsageStats, universal_int_length
from .matching import Occurrence, search_occurrences
from .model import EMPTY, EventDataset, Pattern, singleton_pattern

Sequence = tuple[tuple[int, ...], ...]


class CoverError(ValueError):
    """A cover or token stream is internally inconsistent."""


@dataclass(frozen=True)
class PatternToken:
    pattern: Pattern


@dataclass(frozen=True)
class GapToken:
    pattern: Pattern


@dataclass(frozen=True)
class FillToken:
    pattern: Pattern


@dataclass(frozen=True)
class MissToken:
    pattern: Pattern
    attr: int
    actual: int


@dataclass(frozen=True)
class SingletonToken:
    attr: int
    value: int


@dataclass
class SequenceCover:
    """Accepted pattern occurrences plus singleton fills for one sequence."""

    assignments: list[tuple[Pattern, Occurrence]]
    singleton_fills: list[tuple[int, int, int]]

    def claimed_slots(self) -> set[tuple[int, int]]:
        out: set[tuple[int, int]] = set()
        for _p, occ in self.assignments:
            out |= occ.claims
        return out

    def miss_records(self) -> list[tuple[int, int, Pattern]]:
        return [
            (e, k, p) for p, occ in self.assignments for (e, k) in occ.misses
        ]


def cover_sequence(
    sequence: Sequence,
    ct: CodeTable,
    occurrences: dict[Pattern, list[Occurrence]] | None = None,
) -> SequenceCover:
    """Greedy cover in cover order; claims never overlap."""
    arity = ct.schema.arity
    total_slots = len(sequence) * arity
    claimed: set[tuple[int, int]] = set()
    assignments: list[tuple[Pattern, Occurrence]] = []
    for pattern in ct.cover_order():
        if occurrences is not None:
            occs = occurrences.get(pattern, [])
        else:
            occs = search_occurrences(
                pattern,
                sequence,
                max_misses=None if ct.miss_codes_enabled else 0,
            )
        for occ in occs:
            if claimed.isdisjoint(occ.claims):
                assignments.append((pattern, occ))
                claimed |= occ.claims
        if len(claimed) == total_slots:
            break
    fills = [
        (e, k, sequence[e][k])
        for e in range(len(sequence))
        for k in range(arity)
        if (e, k) not in claimed
    ]
    return SequenceCover(assignments, fills)


def accumulate_stats(
    covers: list[SequenceCover], ct: CodeTable
) -> dict[Pattern, UsageStats]:
    """Merge per-sequence covers into global usage statistics."""
    stats: dict[Pattern, UsageStats] = {}
    arity = ct.schema.arity
    for cover in covers:
        for pattern, occ in cover.assignments:
            s = stats.setdefault(pattern, UsageStats())
            s.usage += 1
            s.gaps += occ.gap_count
            s.fills += pattern.length - 1
            s.misses += len(occ.misses)
        for _e, k, v in cover.singleton_fills:
            s = stats.setdefault(singleton_pattern(arity, k, v), UsageStats())
            s.usage += 1
    return stats


def encode_cover(
    sequence: Sequence, ct: CodeTable, cover: SequenceCover
) -> list:
    """Serialize a cover to its token stream.

    Scan the grid event-major for the first unencoded value, emit the
    owning occurrence as one contiguous run (pattern code, then fill and
    gap codes across its span, miss codes right after the code of their
    event), or a singleton code, until every value is encoded.
    """
    arity = ct.schema.arity
    owner: dict[tuple[int, int], int] = {}
    for idx, (_p, occ) in enumerate(cover.assignments):
        for slot in occ.claims:
            if slot in owner:
                raise CoverError(f"slot {slot} claimed twice")
            owner[slot] = idx
    single: dict[tuple[int, int], int] = {}
    for e, k, v in cover.singleton_fills:
        if (e, k) in owner or (e, k) in single:
            raise CoverError(f"slot {(e, k)} covered twice")
        single[(e, k)] = v
    tokens: list = []
    encoded: set[tuple[int, int]] = set()
    emitted: set[int] = set()
    for e in range(len(sequence)):
        for k in range(arity):
            slot = (e, k)
            if slot in encoded:
                continue
            if slot in owner:
                idx = owner[slot]
                if idx in emitted:
                    raise CoverError("occurrence revisited before completion")
                pattern, occ = cover.assignments[idx]
                miss_by_event: dict[int, int] = {ev: k2 for ev, k2 in occ.misses}
                matched = set(occ.matched)
                for ev in range(occ.matched[0], occ.matched[-1] + 1):
                    if ev == occ.matched[0]:
                        tokens.append(PatternToken(pattern))
                    elif ev in matched:
                        tokens.append(FillToken(pattern))
                    else:
                        tokens.append(GapToken(pattern))
                        continue
                    if ev in miss_by_event:
                        k2 = miss_by_event[ev]
                        tokens.append(MissToken(pattern, k2, sequence[ev][k2]))
                emitted.add(idx)
                encoded |= occ.claims
            elif slot in single:
                tokens.append(SingletonToken(k, single[slot]))
                encoded.add(slot)
            else:
                raise CoverError(f"slot {slot} not covered")
    if len(encoded) != len(sequence) * arity:
        raise CoverError("cover does not span the sequence")
    return tokens


def decode_stream(tokens: list, schema, num_events: int) -> Sequence:
    """Replay a token stream back into the original sequence values."""
    arity = schema.arity
    grid = [[EMPTY] * arity for _ in range(num_events)]

    def first_unknown() -> tuple[int, int]:
        for e in range(num_events):
            for k in range(arity):
                if grid[e][k] == EMPTY:
                    return e, k
        raise CoverError("token stream continues past a full sequence")

    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if isinstance(tok, SingletonToken):
            e, k = first_unknown()
            if k != tok.attr:
                raise CoverError("singleton token out of scan order")
            grid[e][k] = tok.value
            i += 1
        elif isinstance(tok, PatternToken):
            pattern = tok.pattern
            e, _k = first_unknown()
            cursor = e
            placed = 0

            def place(ev_idx: int, p_ev: tuple[int, ...]) -> None:
                for kk, vv in enumerate(p_ev):
                    if vv != EMPTY:
                        grid[ev_idx][kk] = vv

            place(cursor, pattern.events[0])
            placed = 1
            i += 1
            while i < len(tokens):
                nxt = tokens[i]
                if isinstance(nxt, MissToken) and nxt.pattern == pattern:
                    grid[cursor][nxt.attr] = nxt.actual
                    i += 1
                elif placed < pattern.length and isinstance(nxt, GapToken) and nxt.pattern == pattern:
                    cursor += 1
                    i += 1
                elif placed < pattern.length and isinstance(nxt, FillToken) and nxt.pattern == pattern:
                    cursor += 1
                    place(cursor, pattern.events[placed])
                    placed += 1
                    i += 1
                else:
                    break
            if placed != pattern.length:
                raise CoverError("pattern run ended before all events were placed")
        else:
            raise CoverError(f"unexpected token {tok!r} outside a pattern run")
    for e in range(num_events):
        for k in range(arity):
            if grid[e][k] == EMPTY:
                raise CoverError("token stream leaves values undecoded")
    return tuple(tuple(row) for row in grid)


def header_bits(dataset: EventDataset) -> float:
    """Universal-code headers: sequence count, each length, attribute count."""
    bits = universal_int_length(dataset.num_sequences)
    for seq in dataset.sequences:
        bits += universal_int_length(len(seq))
    bits += universal_int_length(dataset.schema.arity)
    return bits


def _plogp_sum(counts: list[int]) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    acc = total * math.log2(total)
    for c in counts:
        if c > 0:
            acc -= c * math.log2(c)
    return acc


def data_bits_from_stats(
    stats: dict[Pattern, UsageStats], dataset: EventDataset
) -> float:
    """Data-side bits from accumulated usage statistics.

    One shared distribution prices the pattern codes of all used patterns;
    each pattern prices its gap, fill and miss codes from its own counts,
    and every miss token carries the attribute index in a universal code.
    Misses are structurally zero when miss codes are disabled.
    """
    bits = header_bits(dataset)
    usages = [s.usage for s in stats.values() if s.usage > 0]
    bits += _plogp_sum(usages)
    arity_bits = universal_int_length(dataset.schema.arity)
    for s in stats.values():
        if s.gaps or s.fills or s.misses:
            bits += _plogp_sum([s.gaps, s.fills, s.misses])
            bits += s.misses * arity_bits
    return bits


def length_of_data(dataset: EventDataset, ct: CodeTable) -> float:
    """Cover every sequence, install the fresh stats, return the data bits."""
    covers = []
    support: dict[Pattern, int] = {p: 0 for p in ct.ct_star}
    for seq in dataset.sequences:
        occs: dict[Pattern, list[Occurrence]] = {}
        for p in ct.ct_star:
            found = search_occurrences(
                p, seq, max_misses=None if ct.miss_codes_enabled else 0
            )
            occs[p] = found
            support[p] += len(found)
        covers.append(cover_sequence(seq, ct, occs))
    stats = accumulate_stats(covers, ct)
    ct.install_stats(stats, support)
    return data_bits_from_stats(stats, dataset)


def total_description_length(dataset: EventDataset, ct: CodeTable) -> float:
    """Two-part total: data bits (fresh covering pass) plus model bits."""
    from .codetable import length_of_model

    data = length_of_data(dataset, ct)
    return data + length_of_model(ct, dataset)
