"""Core data model: attribute schemas, event sequences, and multivariate patterns.

Events are fixed-arity tuples of integer value ids, one slot per attribute.
Pattern events may leave slots empty; dataset events may not.
"""

from __future__ import annotations

from dataclasses import dataclass

EMPTY = -1


class SchemaError(ValueError):
    """Raised for malformed schemas or events that do not fit a schema."""


class PatternError(ValueError):
    """Raised for structurally invalid patterns."""


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered attributes, each with an ordered list of declared value names.

    Value ids are dense integers assigned in declaration order; all
    comparisons and hashes work on ids, names are for I/O only.
    """

    names: tuple[str, ...]
    values: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise SchemaError("schema needs at least one attribute")
        if len(self.names) != len(self.values):
            raise SchemaError("attribute names and value lists disagree")
        if len(set(self.names)) != len(self.names):
            raise SchemaError("duplicate attribute names")
        for name, vals in zip(self.names, self.values):
            if not vals:
                raise SchemaError(f"attribute {name!r} has no values")
            if len(set(vals)) != len(vals):
                raise SchemaError(f"attribute {name!r} has duplicate values")

    @property
    def arity(self) -> int:
        return len(self.names)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(vals) for vals in self.values)

    @property
    def total_values(self) -> int:
        return sum(self.sizes)

    def value_id(self, attr: int, name: str) -> int:
        try:
            return self.values[attr].index(name)
        except ValueError:
            raise SchemaError(
                f"unknown value {name!r} for attribute {self.names[attr]!r}"
            ) from None

    def value_name(self, attr: int, value: int) -> str:
        return self.values[attr][value]

    def validate_event(self, event: tuple[int, ...], allow_empty: bool) -> None:
        if len(event) != self.arity:
            raise SchemaError(
                f"event arity {len(event)} does not match schema arity {self.arity}"
            )
        for k, v in enumerate(event):
            if v == EMPTY:
                if not allow_empty:
                    raise SchemaError("dataset events may not have empty slots")
                continue
            if not 0 <= v < len(self.values[k]):
                raise SchemaError(
                    f"value id {v} out of range for attribute {self.names[k]!r}"
                )


@dataclass(frozen=True)
class Pattern:
    """A short multivariate pattern: a tuple of partial events.

    Invariants: at least one event, no all-empty event, consistent arity.
    `length` counts events, `size` counts non-empty value slots.
    """

    events: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.events:
            raise PatternError("pattern needs at least one event")
        arity = len(self.events[0])
        for ev in self.events:
            if len(ev) != arity:
                raise PatternError("pattern events have inconsistent arity")
            if all(v == EMPTY for v in ev):
                raise PatternError("pattern contains an all-empty event")

    @property
    def length(self) -> int:
        return len(self.events)

    @property
    def size(self) -> int:
        return sum(1 for ev in self.events for v in ev if v != EMPTY)

    @property
    def max_gaps(self) -> int:
        return len(self.events) - 1

    @property
    def max_misses(self) -> int:
        # one tolerated miss per ten values, rounding half up: 0 below size 5
        return (self.size + 5) // 10

    @property
    def arity(self) -> int:
        return len(self.events[0])

    def sort_key(self) -> tuple[tuple[int, ...], ...]:
        return self.events

    def __repr__(self) -> str:  # compact: -1 slots shown as '*'
        rows = ";".join(
            ",".join("*" if v == EMPTY else str(v) for v in ev) for ev in self.events
        )
        return f"Pattern[{rows}]"


def singleton_pattern(arity: int, attr: int, value: int) -> Pattern:
    """Single-event pattern holding exactly one value."""
    slots = [EMPTY] * arity
    slots[attr] = value
    return Pattern((tuple(slots),))


@dataclass(frozen=True)
class EventDataset:
    """An immutable bag of event sequences over a shared schema."""

    schema: AttributeSchema
    sequences: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self) -> None:
        if not self.sequences:
            raise SchemaError("dataset needs at least one sequence")
        for seq in self.sequences:
            if not seq:
                raise SchemaError("dataset contains an empty sequence")
            for ev in seq:
                self.schema.validate_event(ev, allow_empty=False)

    @property
    def num_sequences(self) -> int:
        return len(self.sequences)

    @property
    def num_events(self) -> int:
        return sum(len(s) for s in self.sequences)

    @property
    def num_values(self) -> int:
        return self.num_events * self.schema.arity


def event_part_of(ea: tuple[int, ...], eb: tuple[int, ...]) -> bool:
    """True when every non-empty slot of ea agrees with eb."""
    if len(ea) != len(eb):
        raise SchemaError("events of different arity are not comparable")
    return all(a == EMPTY or a == b for a, b in zip(ea, eb))


def is_subsequence(
    inner: tuple[tuple[int, ...], ...], outer: tuple[tuple[int, ...], ...]
) -> bool:
    """Order-preserving embedding test with per-event partial matching.

    Greedy earliest embedding; correct because any feasible embedding can be
    shifted left event by event.
    """
    j = 0
    for ev in outer:
        if j < len(inner) and event_part_of(inner[j], ev):
            j += 1
    return j == len(inner)


def canonical_compare(pa: Pattern, pb: Pattern) -> int:
    """Total order on patterns: event-major, then attribute-major slot ids.

    Empty slots sort before any value id; a strict prefix sorts first.
    """
    a, b = pa.events, pb.events
    if a == b:
        return 0
    return -1 if a < b else 1
