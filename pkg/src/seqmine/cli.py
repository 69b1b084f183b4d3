"""Command-line surface: gen, mine, eval, bench.

Exit codes: 0 success, 2 input error, 3 configuration error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .codetable import UndefinedCodeLengthError
from .covering import CoverError
from .fileio import (
    BENCH_REPORT_COLUMNS,
    RUN_REPORT_COLUMNS,
    ParseError,
    PatternRecord,
    parse_dataset,
    parse_patterns,
    parse_truth,
    write_dataset,
    write_patterns,
    write_report,
    write_truth,
)
from .matching import OccurrenceError
from .mining import ConfigError, MinerConfig, mine, final_cover_state
from .model import PatternError, SchemaError
from .synthetic import (
    GenerationError,
    SyntheticSpec,
    evaluate_slots,
    generate_dataset,
)

log = logging.getLogger("seqmine")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we map to 3
        raise ConfigError(message)


def _figure_path(report_path: str) -> str:
    stem, _, ext = report_path.rpartition(".")
    return (stem if stem else report_path) + ".png"


def _add_miner_flags(sub) -> None:
    sub.add_argument("--no-miss", action="store_true", help="disable miss codes")
    sub.add_argument("--no-lsh", action="store_true", help="disable sketch filtering")
    sub.add_argument("--lsh-threshold", type=float, default=0.3)
    sub.add_argument("--lsh-min-cooccur", type=float, default=None)
    sub.add_argument("--segment-len", type=int, default=20)
    sub.add_argument("--lsh-samples", type=int, default=64)
    sub.add_argument("--max-iters", type=int, default=100)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--threads", type=int, default=1)


def _config_from(args, enable_miss: bool | None = None, enable_lsh: bool | None = None):
    return MinerConfig(
        enable_miss_codes=not args.no_miss if enable_miss is None else enable_miss,
        enable_lsh=not args.no_lsh if enable_lsh is None else enable_lsh,
        lsh_threshold=args.lsh_threshold,
        lsh_min_cooccur=args.lsh_min_cooccur,
        lsh_samples=args.lsh_samples,
        segment_len=args.segment_len,
        variation_threshold=0.5,
        max_iterations=args.max_iters,
        seed=args.seed,
        threads=args.threads,
    )


def _pattern_records(dataset, patterns, cfg):
    ct, covers, _total = final_cover_state(dataset, patterns, cfg)
    by_pattern: dict = {p: [] for p in patterns}
    for i, cover in enumerate(covers):
        for e, k, p in cover.miss_records():
            by_pattern[p].append((i, e, k))
    records = []
    for p in patterns:
        stats = ct.stats.get(p)
        records.append(
            PatternRecord(
                pattern=p,
                usage=stats.usage if stats else 0,
                support=ct.support.get(p, 0),
                misses=sorted(by_pattern.get(p, [])),
            )
        )
    return records, covers


def _cmd_gen(args) -> int:
    spec = SyntheticSpec(
        num_sequences=args.sequences,
        sequence_length=args.length,
        num_attributes=args.attrs,
        values_per_attribute=args.values,
        num_patterns=args.plant,
        values_per_pattern=args.pattern_values,
        coverage_fraction=args.coverage,
        planted_misses_per_pattern=args.misses,
        seed=args.seed,
        plant_gaps=args.plant_gaps,
    )
    dataset, truth = generate_dataset(spec)
    write_dataset(dataset, args.out)
    if args.truth_out:
        write_truth(args.truth_out, truth)
    log.info(
        "wrote %d sequences (%d events) to %s",
        dataset.num_sequences,
        dataset.num_events,
        args.out,
    )
    return 0


def _cmd_mine(args) -> int:
    dataset = parse_dataset(args.input)
    cfg = _config_from(args)
    patterns, report = mine(dataset, cfg)
    records, _covers = _pattern_records(dataset, patterns, cfg)
    meta = {
        "pattern_count": report.pattern_count,
        "delta_l_percent": f"{report.delta_l_percent:.4f}",
        "miss_count": report.miss_count,
        "baseline_bits": f"{report.baseline_bits:.4f}",
        "final_bits": f"{report.final_bits:.4f}",
        "iterations": report.iterations,
        "runtime_seconds": f"{report.runtime_seconds:.3f}",
    }
    write_patterns(args.output, dataset.schema, records, meta)
    if args.report:
        row = {
            "|P|": report.pattern_count,
            "dL%": report.delta_l_percent,
            "miss": report.miss_count,
            "t(s)": report.runtime_seconds,
        }
        write_report(args.report, [row], RUN_REPORT_COLUMNS)
        from .figures import save_dl_trace

        save_dl_trace(report.dl_trace, _figure_path(args.report))
    log.info(
        "mined %d patterns, dL%%=%.1f in %.2fs",
        report.pattern_count,
        report.delta_l_percent,
        report.runtime_seconds,
    )
    return 0


def _cmd_eval(args) -> int:
    _schema, records, meta = parse_patterns(args.mined)
    truth = parse_truth(args.truth)
    patterns = [rec.pattern for rec in records]
    miss_slots = {slot for rec in records for slot in rec.misses}
    delta = float(meta.get("delta_l_percent", 0.0))
    metrics = evaluate_slots(patterns, miss_slots, truth, delta)
    row = {
        "recovery": metrics.pattern_recovery,
        "miss_det": metrics.miss_detection,
        "|P|": metrics.pattern_count,
        "dL%": metrics.delta_l_percent,
        "spurious": metrics.spurious_patterns,
    }
    columns = ["recovery", "miss_det", "|P|", "dL%", "spurious"]
    if args.report:
        write_report(args.report, [row], columns)
    print(
        "recovery={recovery:.2f} miss_det={miss_det:.2f} |P|={p} dL%={dl:.2f} "
        "spurious={sp}".format(
            recovery=metrics.pattern_recovery,
            miss_det=metrics.miss_detection,
            p=metrics.pattern_count,
            dl=metrics.delta_l_percent,
            sp=metrics.spurious_patterns,
        )
    )
    return 0


_VARIANTS = {
    "full": (True, True),
    "miss": (True, False),
    "lsh": (False, True),
    "none": (False, False),
}


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def _cmd_bench(args) -> int:
    rows = []
    for ns in _int_list(args.sequences):
        for ln in _int_list(args.length):
            for na in _int_list(args.attrs):
                for nv in _int_list(args.values):
                    spec = SyntheticSpec(
                        num_sequences=ns,
                        sequence_length=ln,
                        num_attributes=na,
                        values_per_attribute=nv,
                        num_patterns=args.plant,
                        values_per_pattern=args.pattern_values,
                        coverage_fraction=args.coverage,
                        planted_misses_per_pattern=args.misses,
                        seed=args.seed,
                    )
                    dataset, _truth = generate_dataset(spec)
                    for name in args.variants.split(","):
                        name = name.strip()
                        if name not in _VARIANTS:
                            raise ConfigError(f"unknown variant {name!r}")
                        miss_on, lsh_on = _VARIANTS[name]
                        cfg = _config_from(
                            args, enable_miss=miss_on, enable_lsh=lsh_on
                        )
                        _patterns, report = mine(dataset, cfg)
                        rows.append(
                            {
                                "variant": name,
                                "|S|": ns,
                                "|s|": ln,
                                "|A|": na,
                                "|V|": nv,
                                "|P|": report.pattern_count,
                                "dL%": report.delta_l_percent,
                                "miss": report.miss_count,
                                "t(s)": report.runtime_seconds,
                            }
                        )
                        log.info(
                            "bench %s on %dx%dx%dx%d: |P|=%d dL%%=%.1f t=%.2fs",
                            name,
                            ns,
                            ln,
                            na,
                            nv,
                            report.pattern_count,
                            report.delta_l_percent,
                            report.runtime_seconds,
                        )
    write_report(args.report, rows, BENCH_REPORT_COLUMNS)
    from .figures import save_variant_chart

    save_variant_chart(rows, _figure_path(args.report))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="seqmine", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="generate a synthetic dataset")
    gen.add_argument("--sequences", type=int, default=50)
    gen.add_argument("--length", type=int, default=20)
    gen.add_argument("--attrs", type=int, default=5)
    gen.add_argument("--values", type=int, default=100)
    gen.add_argument("--plant", type=int, default=5)
    gen.add_argument("--pattern-values", type=int, default=5)
    gen.add_argument("--coverage", type=float, default=0.10)
    gen.add_argument("--misses", type=int, default=2)
    gen.add_argument("--plant-gaps", action="store_true")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--truth-out", default=None)
    gen.set_defaults(func=_cmd_gen)

    mine_p = subs.add_parser("mine", help="mine a pattern set")
    mine_p.add_argument("--input", required=True)
    mine_p.add_argument("--output", required=True)
    mine_p.add_argument("--report", default=None)
    _add_miner_flags(mine_p)
    mine_p.set_defaults(func=_cmd_mine)

    ev = subs.add_parser("eval", help="score a mined set against planted truth")
    ev.add_argument("--mined", required=True)
    ev.add_argument("--truth", required=True)
    ev.add_argument("--report", default=None)
    ev.set_defaults(func=_cmd_eval)

    bench = subs.add_parser("bench", help="run ablation variants over a spec grid")
    bench.add_argument("--sequences", default="50")
    bench.add_argument("--length", default="20")
    bench.add_argument("--attrs", default="5")
    bench.add_argument("--values", default="100")
    bench.add_argument("--plant", type=int, default=5)
    bench.add_argument("--pattern-values", type=int, default=5)
    bench.add_argument("--coverage", type=float, default=0.10)
    bench.add_argument("--misses", type=int, default=2)
    bench.add_argument("--variants", default="full,miss,lsh,none")
    bench.add_argument("--report", required=True)
    _add_miner_flags(bench)
    bench.set_defaults(func=_cmd_bench)
    return parser


def entrypoint(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(message)s",
        )
        return args.func(args)
    except (ConfigError, GenerationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (
        CoverError,
        OccurrenceError,
        UndefinedCodeLengthError,
        SchemaError,
        PatternError,
    ) as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(entrypoint())
