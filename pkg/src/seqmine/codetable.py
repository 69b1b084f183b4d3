"""Code tables and model-side description lengths.

A code table is the standard table of all singletons plus the mined
pattern set.  Code lengths are idealized Shannon lengths over usage
counts; model cost prices each mined pattern through the singleton codes
of its values plus universal integer codes for its shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import EMPTY, AttributeSchema, EventDataset, Pattern, singleton_pattern

# Normalization constant of the universal code for the integers, so that
# sum over n >= 1 of 2^-L(n) is (approximately) one.
RISSANEN_C0 = 2.865064

LOG2_C0 = math.log2(RISSANEN_C0)


class UndefinedCodeLengthError(KeyError):
    """A code length was requested for a pattern that has no code."""


def universal_int_length(n: int) -> float:
    """Length in bits of the universal code for a non-negative integer.

    L(0) is defined as 0; for n >= 1 the length is log2(c0) plus the
    iterated logarithm terms of n while they stay positive.
    """
    if n < 0:
        raise ValueError("universal code is defined for non-negative integers")
    if n == 0:
        return 0.0
    bits = LOG2_C0
    term = math.log2(n)
    while term > 0:
        bits += term
        term = math.log2(term)
    return bits


def log2_binomial(n: int, k: int) -> float:
    """log2 of C(n, k); zero for the degenerate cases k <= 0 or k > n."""
    if k <= 0 or k > n:
        return 0.0
    return (
        math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    ) / math.log(2)


@dataclass
class UsageStats:
    """Cover statistics of one pattern accumulated over a full pass."""

    usage: int = 0
    gaps: int = 0
    fills: int = 0
    misses: int = 0

    def copy(self) -> "UsageStats":
        return UsageStats(self.usage, self.gaps, self.fills, self.misses)


@dataclass
class CodeTable:
    """Standard table (all singletons) plus the mined pattern list.

    Mined patterns are kept sorted canonically; stats and supports are
    installed wholesale by covering passes.
    """

    schema: AttributeSchema
    st: tuple[Pattern, ...]
    ct_star: list[Pattern] = field(default_factory=list)
    stats: dict[Pattern, UsageStats] = field(default_factory=dict)
    support: dict[Pattern, int] = field(default_factory=dict)
    miss_codes_enabled: bool = True

    def __contains__(self, pattern: Pattern) -> bool:
        return pattern in self._star_set

    def __post_init__(self) -> None:
        self._star_set = set(self.ct_star)

    def add_pattern(self, pattern: Pattern) -> None:
        if pattern.size < 2:
            raise ValueError("mined patterns must carry at least two values")
        if pattern in self._star_set:
            raise ValueError("pattern already present in the code table")
        self.ct_star.append(pattern)
        self.ct_star.sort(key=lambda p: p.events)
        self._star_set.add(pattern)

    def remove_pattern(self, pattern: Pattern) -> None:
        self.ct_star.remove(pattern)
        self._star_set.remove(pattern)
        self.stats.pop(pattern, None)

    def cover_order(self) -> list[Pattern]:
        """Mined patterns ordered for covering: larger, better supported first."""
        return sorted(
            self.ct_star,
            key=lambda p: (-p.size, -self.support.get(p, 0), p.events),
        )

    def install_stats(
        self, stats: dict[Pattern, UsageStats], support: dict[Pattern, int]
    ) -> None:
        self.stats = stats
        self.support.update(support)


def new_standard_table(
    dataset: EventDataset, miss_codes_enabled: bool = True
) -> CodeTable:
    """Code table holding every singleton of the schema and nothing else."""
    schema = dataset.schema
    singles = tuple(
        singleton_pattern(schema.arity, k, v)
        for k in range(schema.arity)
        for v in range(len(schema.values[k]))
    )
    return CodeTable(schema=schema, st=singles, miss_codes_enabled=miss_codes_enabled)


def pattern_code_lengths(
    stats: dict[Pattern, UsageStats]
) -> dict[Pattern, float]:
    """Shannon lengths -log2(usage / total usage) for used patterns only."""
    total = sum(s.usage for s in stats.values())
    out: dict[Pattern, float] = {}
    if total == 0:
        return out
    log_total = math.log2(total)
    for p, s in stats.items():
        if s.usage > 0:
            out[p] = log_total - math.log2(s.usage)
    return out


def pattern_code_length(ct: CodeTable, pattern: Pattern) -> float:
    """Length of one pattern code; undefined for unused patterns."""
    s = ct.stats.get(pattern)
    if s is None or s.usage == 0:
        raise UndefinedCodeLengthError(
            f"{pattern!r} carries no usage, its code length is undefined"
        )
    total = sum(st.usage for st in ct.stats.values())
    return math.log2(total) - math.log2(s.usage)


def token_code_lengths(
    ct: CodeTable, pattern: Pattern
) -> dict[str, float]:
    """Per-pattern gap/fill/miss code lengths from the shared denominator.

    The miss entry includes the universal code for the attribute index;
    miss_base is the bare distribution length used for Kraft checks.
    """
    s = ct.stats.get(pattern)
    if s is None or s.usage == 0:
        raise UndefinedCodeLengthError(f"{pattern!r} carries no usage")
    denom = s.gaps + s.fills + s.misses
    out: dict[str, float] = {}
    if denom == 0:
        return out
    log_denom = math.log2(denom)
    if pattern.length > 1:
        if s.gaps > 0:
            out["gap"] = log_denom - math.log2(s.gaps)
        out["fill"] = log_denom - math.log2(s.fills)
    if ct.miss_codes_enabled and pattern.size >= 5 and s.misses > 0:
        base = log_denom - math.log2(s.misses)
        out["miss_base"] = base
        out["miss"] = base + universal_int_length(ct.schema.arity)
    return out


def singleton_value_code_length(ct: CodeTable, attr: int, value: int) -> float:
    """Singleton code length used to price pattern values inside the model.

    Falls back to a uniform code over all declared values when the
    singleton currently carries no usage.
    """
    single = singleton_pattern(ct.schema.arity, attr, value)
    s = ct.stats.get(single)
    if s is None or s.usage == 0:
        return math.log2(ct.schema.total_values)
    total = sum(st.usage for st in ct.stats.values())
    return math.log2(total) - math.log2(s.usage)


def standard_table_bits(schema: AttributeSchema, dataset: EventDataset) -> float:
    """Model cost of the standard table: per attribute, the declared value
    count plus the choice of which values appear among that attribute's slots."""
    n_slots = dataset.num_events
    bits = 0.0
    for size in schema.sizes:
        bits += universal_int_length(size) + log2_binomial(n_slots, size)
    return bits


def pattern_model_bits(ct: CodeTable, pattern: Pattern) -> float:
    """Model cost of one mined pattern: shape plus its values in singleton codes."""
    s = ct.stats.get(pattern, UsageStats())
    bits = universal_int_length(pattern.length)
    bits += universal_int_length(pattern.size)
    bits += universal_int_length(s.gaps + 1)
    if ct.miss_codes_enabled:
        bits += universal_int_length(s.misses + 1)
    for ev in pattern.events:
        for k, v in enumerate(ev):
            if v != EMPTY:
                bits += singleton_value_code_length(ct, k, v)
    return bits


def length_of_model(ct: CodeTable, dataset: EventDataset) -> float:
    """Total model-side bits: standard table plus the mined pattern list."""
    bits = standard_table_bits(ct.schema, dataset)
    n_star = len(ct.ct_star)
    usage_star = sum(ct.stats.get(p, UsageStats()).usage for p in ct.ct_star)
    bits += universal_int_length(n_star)
    bits += universal_int_length(usage_star)
    bits += log2_binomial(usage_star, n_star)
    for p in ct.ct_star:
        bits += pattern_model_bits(ct, p)
    return bits
