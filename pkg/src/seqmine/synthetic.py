"""Benchmark data: balanced noise with planted patterns and planted misses.

Generation is three staged overwrites of an event grid: a frequency-
balanced random fill, random pattern drawing, and non-overlapping
planting with a fixed number of single-value corruptions per pattern.
Everything is driven by one seeded RNG, so a spec generates the same
dataset and truth every time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .covering import SequenceCover
from .model import (
    EMPTY,
    AttributeSchema,
    EventDataset,
    Pattern,
    is_subsequence,
)


class GenerationError(ValueError):
    """The spec cannot be realised (unplantable, degenerate counts)."""


@dataclass
class SyntheticSpec:
    num_sequences: int = 50
    sequence_length: int = 20
    num_attributes: int = 5
    values_per_attribute: int = 100
    num_patterns: int = 5
    values_per_pattern: int = 5
    coverage_fraction: float = 0.10
    planted_misses_per_pattern: int = 2
    seed: int = 0
    plant_gaps: bool = False

    def validate(self) -> None:
        for name in (
            "num_sequences",
            "sequence_length",
            "num_attributes",
            "values_per_attribute",
        ):
            if getattr(self, name) < 1:
                raise GenerationError(f"{name} must be at least 1")
        if self.num_patterns < 0 or self.values_per_pattern < 1:
            raise GenerationError("pattern counts out of range")
        if self.planted_misses_per_pattern < 0:
            raise GenerationError("planted_misses_per_pattern must be >= 0")
        if not 0.0 < self.coverage_fraction <= 1.0 and self.num_patterns > 0:
            raise GenerationError("coverage_fraction must lie in (0, 1]")
        total = self.num_sequences * self.sequence_length
        if self.num_patterns > 0 and self.coverage_fraction * total < self.num_patterns:
            raise GenerationError("coverage too small to plant every pattern once")
        if self.values_per_pattern > self.num_attributes * self.sequence_length:
            raise GenerationError("patterns cannot be wider than a sequence")


@dataclass
class PlantedTruth:
    patterns: list[Pattern] = field(default_factory=list)
    occurrences: list[tuple[int, int, tuple[int, ...]]] = field(default_factory=list)
    planted_misses: list[tuple[int, int, int, int, int]] = field(default_factory=list)


def _balanced_fill(rng: random.Random, spec: SyntheticSpec) -> list[list[list[int]]]:
    """Fill every slot so that per-attribute value counts differ by at most 1.

    That construction satisfies the 90% pairwise frequency-balance bound
    directly, without rejection rounds.
    """
    total = spec.num_sequences * spec.sequence_length
    grid = [
        [[0] * spec.num_attributes for _ in range(spec.sequence_length)]
        for _ in range(spec.num_sequences)
    ]
    nvals = spec.values_per_attribute
    for k in range(spec.num_attributes):
        base, rem = divmod(total, nvals)
        pool: list[int] = []
        extras = set(rng.sample(range(nvals), rem)) if rem else set()
        for v in range(nvals):
            pool.extend([v] * (base + (1 if v in extras else 0)))
        rng.shuffle(pool)
        it = iter(pool)
        for s in range(spec.num_sequences):
            for e in range(spec.sequence_length):
                grid[s][e][k] = next(it)
    return grid


def _length_roster(rng: random.Random, spec: SyntheticSpec) -> list[int]:
    """Planted pattern lengths: stratified over the feasible range.

    Round-robin over [lo, hi] with shuffled assignment instead of an
    independent uniform draw per pattern, so the mix of single-event and
    multi-event patterns (and with it the achievable compression) is
    stable across seeds.
    """
    nvals = spec.values_per_pattern
    lo = -(-nvals // spec.num_attributes)
    hi = min(max(lo, round(nvals / 2)), spec.sequence_length)
    if hi < lo:
        raise GenerationError("sequence too short for the requested pattern width")
    roster = [lo + (i % (hi - lo + 1)) for i in range(spec.num_patterns)]
    rng.shuffle(roster)
    return roster


def _draw_pattern(
    rng: random.Random, spec: SyntheticSpec, seen: set, length: int
) -> Pattern:
    nvals = spec.values_per_pattern
    arity = spec.num_attributes
    for _ in range(1000):
        cells = {(e, rng.randrange(arity)) for e in range(length)}
        free = [
            (e, k) for e in range(length) for k in range(arity) if (e, k) not in cells
        ]
        cells.update(rng.sample(free, nvals - length))
        events = []
        for e in range(length):
            row = [EMPTY] * arity
            for k in range(arity):
                if (e, k) in cells:
                    row[k] = rng.randrange(spec.values_per_attribute)
            events.append(tuple(row))
        cand = Pattern(tuple(events))
        if cand.events not in seen:
            seen.add(cand.events)
            return cand
    raise GenerationError("could not draw a fresh pattern; alphabet too small")


def _occurrence_offsets(rng: random.Random, spec: SyntheticSpec, length: int):
    """Relative event positions of one planted occurrence.

    Contiguous by default; with plant_gaps the span stretches by up to
    length - 1 skipped events, staying within the per-occurrence gap cap.
    """
    if not spec.plant_gaps or length == 1:
        return list(range(length))
    gaps = rng.randint(0, min(length - 1, spec.sequence_length - length))
    span = length + gaps
    middle = sorted(rng.sample(range(1, span - 1), length - 2)) if length > 2 else []
    return [0] + middle + [span - 1]


def _plant_one(
    rng: random.Random,
    spec: SyntheticSpec,
    claimed: set,
    slots: list[tuple[int, int]],
    offsets: list[int],
) -> tuple[int, int]:
    span = spec.sequence_length - offsets[-1]
    if span < 1:
        raise GenerationError("pattern longer than the sequences")
    cells = [(offsets[e], k) for e, k in slots]
    for _ in range(200):
        s = rng.randrange(spec.num_sequences)
        start = rng.randrange(span)
        if all((s, start + off, k) not in claimed for off, k in cells):
            return s, start
    feasible = [
        (s, start)
        for s in range(spec.num_sequences)
        for start in range(span)
        if all((s, start + off, k) not in claimed for off, k in cells)
    ]
    if not feasible:
        raise GenerationError("no free slots left to plant an occurrence")
    return feasible[rng.randrange(len(feasible))]


def generate_dataset(spec: SyntheticSpec) -> tuple[EventDataset, PlantedTruth]:
    spec.validate()
    rng = random.Random(spec.seed)
    grid = _balanced_fill(rng, spec)
    truth = PlantedTruth()

    seen: set = set()
    for length in _length_roster(rng, spec):
        truth.patterns.append(_draw_pattern(rng, spec, seen, length))

    total_events = spec.num_sequences * spec.sequence_length
    claimed: set[tuple[int, int, int]] = set()
    for pid, pat in enumerate(truth.patterns):
        length = pat.length
        slots = [
            (e, k)
            for e, ev in enumerate(pat.events)
            for k, v in enumerate(ev)
            if v != EMPTY
        ]
        occ_count = max(1, round(spec.coverage_fraction * total_events / length))
        for _ in range(occ_count):
            offsets = _occurrence_offsets(rng, spec, length)
            s, start = _plant_one(rng, spec, claimed, slots, offsets)
            for e, k in slots:
                grid[s][start + offsets[e]][k] = pat.events[e][k]
                claimed.add((s, start + offsets[e], k))
            truth.occurrences.append(
                (pid, s, tuple(start + off for off in offsets))
            )

    for pid, pat in enumerate(truth.patterns):
        if spec.planted_misses_per_pattern == 0:
            continue
        mine_occs = [t for t in truth.occurrences if t[0] == pid]
        if len(mine_occs) < spec.planted_misses_per_pattern:
            raise GenerationError("fewer occurrences than misses to plant")
        if spec.values_per_attribute < 2:
            raise GenerationError("miss planting needs at least 2 values per attribute")
        slots = [
            (e, k)
            for e, ev in enumerate(pat.events)
            for k, v in enumerate(ev)
            if v != EMPTY
        ]
        for idx in rng.sample(range(len(mine_occs)), spec.planted_misses_per_pattern):
            _, s, events = mine_occs[idx]
            e_off, k = slots[rng.randrange(len(slots))]
            orig = pat.events[e_off][k]
            sub = rng.randrange(spec.values_per_attribute - 1)
            if sub >= orig:
                sub += 1
            grid[s][events[e_off]][k] = sub
            truth.planted_misses.append((pid, s, events[e_off], k, sub))

    schema = AttributeSchema(
        names=tuple(f"a{k + 1}" for k in range(spec.num_attributes)),
        values=tuple(
            tuple(f"v{j + 1}" for j in range(spec.values_per_attribute))
            for _ in range(spec.num_attributes)
        ),
    )
    sequences = tuple(
        tuple(tuple(ev) for ev in seq_rows) for seq_rows in grid
    )
    return EventDataset(schema, sequences), truth


@dataclass
class EvalMetrics:
    pattern_recovery: float
    miss_detection: float
    pattern_count: int
    delta_l_percent: float
    spurious_patterns: int


def _recovers(planted: Pattern, mined: Pattern) -> bool:
    if mined.size < planted.size - 1:
        return False
    return is_subsequence(planted.events, mined.events) or is_subsequence(
        mined.events, planted.events
    )


def evaluate_slots(
    patterns: list[Pattern],
    miss_slots: set[tuple[int, int, int]],
    truth: PlantedTruth,
    delta_l_percent: float = 0.0,
) -> EvalMetrics:
    """Score a mining result against planted ground truth.

    Recovery accepts a mined pattern that embeds in (or absorbs) a planted
    one while carrying at least all but one of its values.  Miss detection
    asks whether each corrupted (sequence, event, attribute) slot is
    explained by a miss code, whatever pattern charged it.
    """
    if truth.patterns:
        hits = sum(
            1 for q in truth.patterns if any(_recovers(q, m) for m in patterns)
        )
        recovery = hits / len(truth.patterns)
    else:
        recovery = 1.0
    spurious = sum(
        1 for m in patterns if not any(_recovers(q, m) for q in truth.patterns)
    )
    planted_slots = {(s, e, k) for (_pid, s, e, k, _v) in truth.planted_misses}
    if planted_slots:
        detection = len(planted_slots & miss_slots) / len(planted_slots)
    else:
        detection = 1.0
    return EvalMetrics(
        pattern_recovery=recovery,
        miss_detection=detection,
        pattern_count=len(patterns),
        delta_l_percent=delta_l_percent,
        spurious_patterns=spurious,
    )


def evaluate(
    patterns: list[Pattern],
    covers: list[SequenceCover],
    truth: PlantedTruth,
    delta_l_percent: float = 0.0,
) -> EvalMetrics:
    """evaluate_slots with the miss slots read off a list of covers."""
    slots = {
        (i, e, k)
        for i, cover in enumerate(covers)
        for (e, k, _p) in cover.miss_records()
    }
    return evaluate_slots(patterns, slots, truth, delta_l_percent)
