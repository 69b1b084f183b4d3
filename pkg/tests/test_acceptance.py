"""Acceptance gates for the full mining pipeline.

Each test prints exactly one `acceptance N <name>: PASS|FAIL` line; run
with `pytest tests/test_acceptance.py -s` to watch them as they finish.
Gate 4 re-mines the benchmark dataset with sketch filtering disabled,
which alone takes a few minutes of wall clock.
"""

import random
from collections import Counter
from dataclasses import dataclass

import pytest

from seqmine import (
    MinerConfig,
    MiningReport,
    SyntheticSpec,
    brute_force_occurrences,
    decode_stream,
    encode_cover,
    final_cover_state,
    generate_dataset,
    mine,
    search_occurrences,
)
from seqmine.codetable import pattern_code_lengths, token_code_lengths
from seqmine.covering import (
    FillToken,
    GapToken,
    MissToken,
    PatternToken,
    SingletonToken,
    accumulate_stats,
    cover_sequence,
)
from seqmine.synthetic import evaluate

from test_matcher import random_case

SEEDS = (4, 5, 6)

BENCH = dict(
    num_sequences=50,
    sequence_length=20,
    num_attributes=5,
    values_per_attribute=100,
    num_patterns=5,
    values_per_pattern=5,
    coverage_fraction=0.10,
    planted_misses_per_pattern=2,
)


def _gate(num: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"acceptance {num} {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert ok, line


@dataclass
class Run:
    dataset: object
    truth: object
    patterns: list
    report: MiningReport
    ct: object
    covers: list
    metrics: object


def _run(seed: int, enable_miss: bool = True, enable_lsh: bool = True) -> Run:
    dataset, truth = generate_dataset(SyntheticSpec(**BENCH, seed=seed))
    cfg = MinerConfig(
        enable_miss_codes=enable_miss, enable_lsh=enable_lsh, seed=seed
    )
    patterns, report = mine(dataset, cfg)
    ct, covers, _total = final_cover_state(dataset, patterns, cfg)
    metrics = evaluate(patterns, covers, truth, report.delta_l_percent)
    return Run(dataset, truth, patterns, report, ct, covers, metrics)


@pytest.fixture(scope="module")
def full_runs():
    return {seed: _run(seed) for seed in SEEDS}


@pytest.fixture(scope="module")
def miss_off_runs():
    return {seed: _run(seed, enable_miss=False) for seed in SEEDS}


@pytest.fixture(scope="module")
def unfiltered_run():
    # slow arm of the timing gate: miss codes on, sketch filtering off
    return _run(SEEDS[0], enable_lsh=False)


def test_1_pattern_recovery(full_runs):
    fractions = [full_runs[s].metrics.pattern_recovery for s in SEEDS]
    ok = all(f >= 0.8 for f in fractions)
    ok = ok and sum(f == 1.0 for f in fractions) >= 2
    _gate(
        1,
        "planted-pattern recovery",
        ok,
        " ".join(f"seed{s}={f:.2f}" for s, f in zip(SEEDS, fractions)),
    )


def test_2_miss_detection(full_runs):
    fractions = [full_runs[s].metrics.miss_detection for s in SEEDS]
    ok = all(f >= 0.8 for f in fractions)
    ok = ok and sum(f == 1.0 for f in fractions) >= 2
    _gate(
        2,
        "planted-miss detection",
        ok,
        " ".join(f"seed{s}={f:.2f}" for s, f in zip(SEEDS, fractions)),
    )


def test_3_compression_band(full_runs):
    deltas = [full_runs[s].report.delta_l_percent for s in SEEDS]
    ok = all(19.0 <= d <= 35.0 for d in deltas)
    _gate(
        3,
        "compression in [19, 35]",
        ok,
        " ".join(f"seed{s}={d:.2f}" for s, d in zip(SEEDS, deltas)),
    )


def test_4_sketch_filtering_speedup(full_runs, unfiltered_run):
    fast = full_runs[SEEDS[0]].report.runtime_seconds
    slow = unfiltered_run.report.runtime_seconds
    _gate(
        4,
        "filtering speedup >= 2x",
        fast <= 0.5 * slow,
        f"filtered={fast:.1f}s unfiltered={slow:.1f}s ratio={fast / slow:.3f}",
    )


def test_5_miss_code_effectiveness(full_runs, miss_off_runs):
    parts = []
    ok = True
    for s in SEEDS:
        on, off = full_runs[s].report, miss_off_runs[s].report
        ok = ok and on.pattern_count <= off.pattern_count
        ok = ok and on.delta_l_percent >= off.delta_l_percent - 0.5
        parts.append(
            f"seed{s}:|P| {on.pattern_count}<={off.pattern_count}"
            f",dL {on.delta_l_percent:.2f}vs{off.delta_l_percent:.2f}"
        )
    _gate(5, "miss codes never hurt", ok, " ".join(parts))


def test_6_matcher_oracle_equivalence():
    rng = random.Random(20_26)
    bad = 0
    for _ in range(200):
        pattern, sequence = random_case(rng)
        if search_occurrences(pattern, sequence) != brute_force_occurrences(
            pattern, sequence
        ):
            bad += 1
    _gate(6, "matcher == oracle on 200 cases", bad == 0, f"mismatches={bad}")


def _coding_problems(run: Run) -> list[str]:
    problems: list[str] = []
    ct, dataset = run.ct, run.dataset
    arity = dataset.schema.arity

    kraft = sum(2.0**-l for l in pattern_code_lengths(ct.stats).values())
    if abs(kraft - 1.0) > 1e-9:
        problems.append(f"pattern-code kraft {kraft!r}")
    for p in ct.ct_star:
        live = [
            bits
            for key, bits in token_code_lengths(ct, p).items()
            if key != "miss"  # carries the attribute payload on top
        ]
        if live and abs(sum(2.0**-b for b in live) - 1.0) > 1e-9:
            problems.append(f"token kraft off for {p!r}")

    counted: Counter = Counter()
    for i, (seq, cover) in enumerate(zip(dataset.sequences, run.covers)):
        slots = sorted(cover.claimed_slots()) + sorted(
            (e, k) for e, k, _v in cover.singleton_fills
        )
        if sorted(slots) != [
            (e, k) for e in range(len(seq)) for k in range(arity)
        ]:
            problems.append(f"partition broken in sequence {i}")
            continue
        tokens = encode_cover(seq, ct, cover)
        if decode_stream(tokens, dataset.schema, len(seq)) != seq:
            problems.append(f"round-trip failed in sequence {i}")
        for tok in tokens:
            if isinstance(tok, PatternToken):
                counted[tok.pattern, "usage"] += 1
            elif isinstance(tok, GapToken):
                counted[tok.pattern, "gap"] += 1
            elif isinstance(tok, FillToken):
                counted[tok.pattern, "fill"] += 1
            elif isinstance(tok, MissToken):
                counted[tok.pattern, "miss"] += 1
            else:
                counted[("single", tok.attr, tok.value), "usage"] += 1

    singles = set(ct.st)
    for p, s in accumulate_stats(run.covers, ct).items():
        if p.size == 1 and p in singles:
            ((k, v),) = [
                (k, v) for k, v in enumerate(p.events[0]) if v != -1
            ]
            if counted[("single", k, v), "usage"] != s.usage:
                problems.append(f"singleton count drift at attr {k}")
        elif (
            counted[p, "usage"] != s.usage
            or counted[p, "gap"] != s.gaps
            or counted[p, "fill"] != s.fills
            or counted[p, "miss"] != s.misses
        ):
            problems.append(f"token counts drift for {p!r}")
    return problems


def test_7_coding_invariants(full_runs, miss_off_runs, unfiltered_run):
    runs = [*full_runs.values(), *miss_off_runs.values(), unfiltered_run]
    problems = [p for run in runs for p in _coding_problems(run)]
    _gate(
        7,
        "kraft/partition/reconcile/round-trip",
        not problems,
        problems[0] if problems else f"{len(runs)} runs clean",
    )


def test_8_description_length_monotonicity(full_runs, miss_off_runs, unfiltered_run):
    runs = [*full_runs.values(), *miss_off_runs.values(), unfiltered_run]
    ok = True
    for run in runs:
        trace = run.report.dl_trace
        ok = ok and all(b < a for a, b in zip(trace, trace[1:]))
        ok = ok and trace[0] == run.report.baseline_bits
        ok = ok and trace[-1] == run.report.final_bits
        ok = ok and run.report.final_bits <= run.report.baseline_bits

    small = SyntheticSpec(
        num_sequences=12,
        sequence_length=12,
        num_attributes=3,
        values_per_attribute=25,
        num_patterns=2,
        values_per_pattern=4,
        coverage_fraction=0.15,
        planted_misses_per_pattern=1,
        seed=8,
    )
    dataset, _truth = generate_dataset(small)
    zero, _ = mine(dataset, MinerConfig(lsh_threshold=0.0, seed=8))
    off, _ = mine(dataset, MinerConfig(enable_lsh=False, seed=8))
    identical = zero == off
    _gate(
        8,
        "DL trace monotone, threshold-0 == unfiltered",
        ok and identical,
        f"{len(runs)} traces, identity={'yes' if identical else 'no'}",
    )


def test_9_worked_figure_cover(worked):
    cover = cover_sequence(worked.sequence, worked.ct)
    shape_ok = (
        [p for p, _ in cover.assignments] == [worked.p1, worked.p2]
        and cover.assignments[0][1].misses == ((1, 1),)
        and cover.assignments[1][1].gap_events() == [2]
        and cover.singleton_fills == [(4, 1, worked.a2["y"])]
    )
    tokens = encode_cover(worked.sequence, worked.ct, cover)
    stream_ok = tokens == [
        PatternToken(worked.p1),
        FillToken(worked.p1),
        MissToken(worked.p1, attr=1, actual=worked.a2["z"]),
        FillToken(worked.p1),
        PatternToken(worked.p2),
        GapToken(worked.p2),
        FillToken(worked.p2),
        FillToken(worked.p2),
        SingletonToken(attr=1, value=worked.a2["y"]),
    ]
    _gate(
        9,
        "worked figure cover and token stream",
        shape_ok and stream_ok,
        f"shape={'ok' if shape_ok else 'bad'} stream={'ok' if stream_ok else 'bad'}",
    )
