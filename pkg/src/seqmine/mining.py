"""Iterative MDL search: grow a pattern set while total bits shrink.

Each iteration proposes candidates (pairwise combinations, optionally
sketch-filtered, plus variations of recent winners), accepts one only
when a re-cover strictly lowers the two-part description length, and
prunes patterns whose usage the acceptance stole.

Re-covers are computed per sequence: a sequence whose candidate has no
occurrence keeps a byte-identical cover, so only affected sequences are
recomputed.  The resulting statistics equal a full pass from scratch.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .candidates import collect_gap_values, generate_candidates, variations
from .codetable import (
    CodeTable,
    UsageStats,
    log2_binomial,
    new_standard_table,
    universal_int_length,
)
from .covering import SequenceCover, header_bits
from .matching import DatasetMatcher, Occurrence
from .model import EventDataset, Pattern, singleton_pattern
from .sketches import IcwsHasher, SegmentMap, promising_pairs


class ConfigError(ValueError):
    """A miner configuration value is out of range or contradictory."""


@dataclass
class MinerConfig:
    enable_miss_codes: bool = True
    enable_lsh: bool = True
    lsh_threshold: float = 0.3
    lsh_min_cooccur: float | None = None
    lsh_samples: int = 64
    segment_len: int = 20
    variation_threshold: float = 0.5
    max_iterations: int = 100
    seed: int = 0
    threads: int = 1

    def validate(self) -> None:
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be at least 1")
        if not 0.0 <= self.lsh_threshold <= 1.0:
            raise ConfigError("lsh_threshold must lie in [0, 1]")
        if self.lsh_min_cooccur is not None and self.lsh_min_cooccur < 0:
            raise ConfigError("lsh_min_cooccur must be non-negative")
        if self.lsh_samples < 1:
            raise ConfigError("lsh_samples must be positive")
        if self.segment_len < 1:
            raise ConfigError("segment_len must be positive")
        if not 0.0 < self.variation_threshold <= 1.0:
            raise ConfigError("variation_threshold must lie in (0, 1]")
        if self.threads < 1:
            raise ConfigError("threads must be positive")


@dataclass
class MiningReport:
    pattern_count: int
    delta_l_percent: float
    miss_count: int
    runtime_seconds: float
    baseline_bits: float
    final_bits: float
    iterations: int
    accepted_count: int
    pruned_count: int
    dl_trace: list[float] = field(default_factory=list)


_ZERO = (0, 0, 0, 0)


def _nlogn(n: int) -> float:
    return n * math.log2(n) if n > 0 else 0.0


class _Engine:
    def __init__(self, dataset: EventDataset, cfg: MinerConfig) -> None:
        self.dataset = dataset
        self.cfg = cfg
        self.schema = dataset.schema
        self.arity = self.schema.arity
        self.matcher = DatasetMatcher(dataset, allow_misses=cfg.enable_miss_codes)
        self.ct = new_standard_table(dataset, miss_codes_enabled=cfg.enable_miss_codes)
        self._singles = {
            (k, v): singleton_pattern(self.arity, k, v)
            for k in range(self.arity)
            for v in range(len(self.schema.values[k]))
        }
        self._headers = header_bits(dataset)
        from .codetable import standard_table_bits

        self._st_bits = standard_table_bits(self.schema, dataset)
        self._arity_bits = universal_int_length(self.arity)
        self._uniform_value_bits = math.log2(self.schema.total_values)
        # running aggregates over all sequences
        self.agg: dict[Pattern, tuple[int, int, int, int]] = {}
        self.seq_stats: list[dict[Pattern, tuple[int, int, int, int]]] = []
        self.covers: list[SequenceCover] = []
        self._U = 0
        self._sum_ulogu = 0.0
        self._gfm_bits = 0.0
        self.total = 0.0
        self.trace: list[float] = []
        self.accepted_count = 0
        self.pruned_count = 0

    # ------------------------------------------------------------------
    # covering

    def _cover_one(
        self, i: int, order: list[Pattern]
    ) -> tuple[SequenceCover, dict[Pattern, tuple[int, int, int, int]]]:
        seq = self.dataset.sequences[i]
        total_slots = len(seq) * self.arity
        claimed: set[tuple[int, int]] = set()
        assignments: list[tuple[Pattern, Occurrence]] = []
        stats: dict[Pattern, tuple[int, int, int, int]] = {}
        for p in order:
            occs = self.matcher.occurrences(p).get(i)
            if not occs:
                continue
            hit = False
            for occ in occs:
                if claimed.isdisjoint(occ.claims):
                    assignments.append((p, occ))
                    claimed |= occ.claims
                    u, g, f, m = stats.get(p, _ZERO)
                    stats[p] = (
                        u + 1,
                        g + occ.gap_count,
                        f + p.length - 1,
                        m + len(occ.misses),
                    )
                    hit = True
            if hit and len(claimed) == total_slots:
                break
        fills: list[tuple[int, int, int]] = []
        if len(claimed) != total_slots:
            for e in range(len(seq)):
                row = seq[e]
                for k in range(self.arity):
                    if (e, k) not in claimed:
                        v = row[k]
                        fills.append((e, k, v))
                        single = self._singles[(k, v)]
                        u, g, f, m = stats.get(single, _ZERO)
                        stats[single] = (u + 1, g, f, m)
        return SequenceCover(assignments, fills), stats

    def _cover_order(self, extra: Pattern | None = None, drop: Pattern | None = None):
        pats = [p for p in self.ct.ct_star if p is not drop]
        if extra is not None:
            pats.append(extra)
        pats.sort(key=lambda p: (-p.size, -self.matcher.support(p), p.events))
        return pats

    def _replay(self, affected: list[int], order: list[Pattern]):
        out = {}
        for i in affected:
            out[i] = self._cover_one(i, order)
        return out

    # ------------------------------------------------------------------
    # description length

    def _gfm_term(self, g: int, f: int, m: int) -> float:
        d = g + f + m
        if d == 0:
            return 0.0
        bits = d * math.log2(d) - _nlogn(g) - _nlogn(f) - _nlogn(m)
        return bits + m * self._arity_bits

    def _stat_with_delta(self, p: Pattern, delta) -> tuple[int, int, int, int]:
        u, g, f, m = self.agg.get(p, _ZERO)
        if delta is not None:
            d = delta.get(p)
            if d is not None:
                u, g, f, m = u + d[0], g + d[1], f + d[2], m + d[3]
        return u, g, f, m

    def _total_bits(self, delta, star: list[Pattern]) -> float:
        u_total = self._U
        sum_ulogu = self._sum_ulogu
        gfm = self._gfm_bits
        if delta:
            for p, (du, dg, df, dm) in delta.items():
                u, g, f, m = self.agg.get(p, _ZERO)
                if du:
                    u_total += du
                    sum_ulogu += _nlogn(u + du) - _nlogn(u)
                if dg or df or dm:
                    gfm += self._gfm_term(g + dg, f + df, m + dm) - self._gfm_term(
                        g, f, m
                    )
        data = self._headers + (_nlogn(u_total) - sum_ulogu) + gfm

        log_u_total = math.log2(u_total) if u_total > 0 else 0.0
        star_usage = 0
        model = self._st_bits + universal_int_length(len(star))
        for p in star:
            u, g, _f, m = self._stat_with_delta(p, delta)
            star_usage += u
            model += universal_int_length(p.length)
            model += universal_int_length(p.size)
            model += universal_int_length(g + 1)
            if self.cfg.enable_miss_codes:
                model += universal_int_length(m + 1)
            for ev in p.events:
                for k, v in enumerate(ev):
                    if v == -1:
                        continue
                    su = self._stat_with_delta(self._singles[(k, v)], delta)[0]
                    if su == 0:
                        model += self._uniform_value_bits
                    else:
                        model += log_u_total - math.log2(su)
        model += universal_int_length(star_usage)
        model += log2_binomial(star_usage, len(star))
        return data + model

    # ------------------------------------------------------------------
    # state transitions

    def _delta_from(self, replayed) -> dict[Pattern, tuple[int, int, int, int]]:
        delta: dict[Pattern, list[int]] = {}

        def bump(p: Pattern, s, sign: int) -> None:
            d = delta.get(p)
            if d is None:
                d = [0, 0, 0, 0]
                delta[p] = d
            d[0] += sign * s[0]
            d[1] += sign * s[1]
            d[2] += sign * s[2]
            d[3] += sign * s[3]

        for i, (_cover, stats) in replayed.items():
            for p, s in self.seq_stats[i].items():
                bump(p, s, -1)
            for p, s in stats.items():
                bump(p, s, +1)
        return {
            p: tuple(d) for p, d in delta.items() if any(d)
        }

    def _commit(self, replayed, delta) -> None:
        for p, (du, dg, df, dm) in delta.items():
            u, g, f, m = self.agg.get(p, _ZERO)
            nu, ng, nf, nm = u + du, g + dg, f + df, m + dm
            self._U += du
            self._sum_ulogu += _nlogn(nu) - _nlogn(u)
            self._gfm_bits += self._gfm_term(ng, nf, nm) - self._gfm_term(g, f, m)
            if nu or ng or nf or nm:
                self.agg[p] = (nu, ng, nf, nm)
            else:
                self.agg.pop(p, None)
        for i, (cover, stats) in replayed.items():
            self.covers[i] = cover
            self.seq_stats[i] = stats

    def _refresh_running_sums(self) -> None:
        """Recompute the float accumulators to cancel drift."""
        self._U = sum(s[0] for s in self.agg.values())
        self._sum_ulogu = sum(_nlogn(s[0]) for s in self.agg.values())
        self._gfm_bits = sum(
            self._gfm_term(s[1], s[2], s[3]) for s in self.agg.values()
        )

    # ------------------------------------------------------------------
    # passes

    def initial_pass(self) -> None:
        order = self._cover_order()
        indices = range(len(self.dataset.sequences))
        if self.cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.threads) as pool:
                results = list(pool.map(lambda i: self._cover_one(i, order), indices))
        else:
            results = [self._cover_one(i, order) for i in indices]
        self.covers = [cover for cover, _stats in results]
        self.seq_stats = [stats for _cover, stats in results]
        agg: dict[Pattern, list[int]] = {}
        for stats in self.seq_stats:
            for p, s in stats.items():
                d = agg.setdefault(p, [0, 0, 0, 0])
                d[0] += s[0]
                d[1] += s[1]
                d[2] += s[2]
                d[3] += s[3]
        self.agg = {p: tuple(d) for p, d in agg.items()}
        self._refresh_running_sums()
        self.total = self._total_bits(None, list(self.ct.ct_star))
        self.trace.append(self.total)

    def try_accept(self, cand: Pattern) -> bool:
        if cand in self.ct:
            return False
        occs = self.matcher.occurrences(cand)
        star = self._cover_order(extra=cand)
        if occs:
            replayed = self._replay(sorted(occs), star)
            delta = self._delta_from(replayed)
        else:
            replayed = {}
            delta = None
        new_total = self._total_bits(delta, star)
        if new_total >= self.total:
            return False
        pre_usages = {p: self.agg.get(p, _ZERO)[0] for p in self.ct.ct_star}
        self.ct.add_pattern(cand)
        self._commit(replayed, delta or {})
        self.total = new_total
        self.trace.append(new_total)
        self.accepted_count += 1
        self._prune(pre_usages)
        return True

    def _prune(self, pre_usages: dict[Pattern, int]) -> None:
        shrunk = [
            (pre_usages[p] - self.agg.get(p, _ZERO)[0], p)
            for p in list(self.ct.ct_star)
            if p in pre_usages and self.agg.get(p, _ZERO)[0] < pre_usages[p]
        ]
        shrunk.sort(key=lambda t: (-t[0], t[1].events))
        for _drop, victim in shrunk:
            affected = [
                i
                for i, stats in enumerate(self.seq_stats)
                if stats.get(victim, _ZERO)[0] > 0
            ]
            order = self._cover_order(drop=victim)
            replayed = self._replay(affected, order)
            delta = self._delta_from(replayed)
            new_total = self._total_bits(delta, order)
            if new_total < self.total:
                self.ct.remove_pattern(victim)
                self._commit(replayed, delta)
                self.total = new_total
                self.trace.append(new_total)
                self.pruned_count += 1

    # ------------------------------------------------------------------
    # candidate pools

    def _live_patterns(self) -> list[Pattern]:
        singles = [
            p for p in self.ct.st if self.agg.get(p, _ZERO)[0] > 0
        ]
        return singles + list(self.ct.ct_star)

    def _segment_weights(self, segmap: SegmentMap) -> dict[Pattern, Counter]:
        weights: dict[Pattern, Counter] = {}
        for i, cover in enumerate(self.covers):
            for p, occ in cover.assignments:
                w = weights.setdefault(p, Counter())
                for seg in segmap.segments_for(i, occ.matched[0], occ.matched[-1]):
                    w[seg] += 1
            for e, k, v in cover.singleton_fills:
                single = self._singles[(k, v)]
                w = weights.setdefault(single, Counter())
                w[next(iter(segmap.segments_for(i, e, e)))] += 1
        return weights

    def _pairs(self, segmap: SegmentMap, hasher: IcwsHasher | None):
        live = self._live_patterns()
        cfg = self.cfg
        filtering = (
            cfg.enable_lsh
            and hasher is not None
            and (cfg.lsh_threshold > 0 or cfg.lsh_min_cooccur is not None)
        )
        if not filtering:
            return [
                (live[i], live[j])
                for i in range(len(live))
                for j in range(i, len(live))
            ]
        weights = self._segment_weights(segmap)
        sketchable = [p for p in live if weights.get(p)]
        sigs = [hasher.signature(weights[p]) for p in sketchable]
        totals = [float(sum(weights[p].values())) for p in sketchable]
        idx_pairs = promising_pairs(
            sketchable, sigs, cfg.lsh_threshold, cfg.lsh_min_cooccur, totals
        )
        return [(sketchable[i], sketchable[j]) for i, j in idx_pairs]

    def _variation_pool(self, accepted: list[Pattern]) -> dict[Pattern, int]:
        extra: dict[Pattern, int] = {}
        for p in accepted:
            if p not in self.ct:
                continue
            usages = [
                (self.dataset.sequences[i], occ)
                for i, cover in enumerate(self.covers)
                for q, occ in cover.assignments
                if q == p
            ]
            if not usages:
                continue
            count, gap_counts = collect_gap_values(p, usages)
            for var in variations(
                p, count, gap_counts, self.cfg.variation_threshold
            ):
                if var in self.ct:
                    continue
                est = self.matcher.support(p)
                cur = extra.get(var)
                if cur is None or est > cur:
                    extra[var] = est
        return extra

    # ------------------------------------------------------------------

    def run(self) -> tuple[list[Pattern], MiningReport]:
        started = time.perf_counter()
        self.initial_pass()
        baseline = self.total
        segmap = SegmentMap(self.dataset, self.cfg.segment_len)
        hasher = None
        if self.cfg.enable_lsh and segmap.total_segments > 0:
            hasher = IcwsHasher(
                segmap.total_segments, self.cfg.lsh_samples, self.cfg.seed
            )
        accepted_last: list[Pattern] = []
        iterations = 0
        for _ in range(self.cfg.max_iterations):
            iterations += 1
            before_star = set(self.ct.ct_star)
            pairs = self._pairs(segmap, hasher)
            extra = self._variation_pool(accepted_last)
            pool = generate_candidates(
                self.matcher.support,
                pairs,
                exclude=frozenset(self.ct.ct_star),
                extra=extra,
            )
            accepted_now: list[Pattern] = []
            for cand, _est in pool:
                if self.try_accept(cand):
                    accepted_now.append(cand)
            self._refresh_running_sums()
            accepted_last = [p for p in accepted_now if p in self.ct]
            if set(self.ct.ct_star) == before_star:
                break
        final_stats = {
            p: UsageStats(*s) for p, s in self.agg.items()
        }
        support = {p: self.matcher.support(p) for p in self.ct.ct_star}
        self.ct.install_stats(final_stats, support)
        runtime = time.perf_counter() - started
        miss_count = sum(s[3] for s in self.agg.values())
        report = MiningReport(
            pattern_count=len(self.ct.ct_star),
            delta_l_percent=(
                100.0 * (baseline - self.total) / baseline if baseline > 0 else 0.0
            ),
            miss_count=miss_count,
            runtime_seconds=runtime,
            baseline_bits=baseline,
            final_bits=self.total,
            iterations=iterations,
            accepted_count=self.accepted_count,
            pruned_count=self.pruned_count,
            dl_trace=list(self.trace),
        )
        return sorted(self.ct.ct_star, key=lambda p: p.events), report


def mine(dataset: EventDataset, cfg: MinerConfig | None = None):
    """Mine a compact pattern set; returns (patterns, report)."""
    cfg = cfg or MinerConfig()
    cfg.validate()
    engine = _Engine(dataset, cfg)
    return engine.run()


def final_cover_state(dataset: EventDataset, patterns, cfg: MinerConfig | None = None):
    """Re-cover a dataset under a fixed pattern set.

    Returns (code table, covers) with installed statistics; used for
    evaluation and for auditing a mining result.
    """
    cfg = cfg or MinerConfig()
    engine = _Engine(dataset, cfg)
    for p in patterns:
        engine.ct.add_pattern(p)
    engine.initial_pass()
    final_stats = {p: UsageStats(*s) for p, s in engine.agg.items()}
    support = {p: engine.matcher.support(p) for p in engine.ct.ct_star}
    engine.ct.install_stats(final_stats, support)
    return engine.ct, engine.covers, engine.total
