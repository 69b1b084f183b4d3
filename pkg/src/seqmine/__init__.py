"""Compact multivariate sequential patterns by description-length minimization."""

from .codetable import (
    CodeTable,
    UndefinedCodeLengthError,
    UsageStats,
    length_of_model,
    log2_binomial,
    new_standard_table,
    universal_int_length,
)
from .covering import (
    CoverError,
    SequenceCover,
    cover_sequence,
    decode_stream,
    encode_cover,
    length_of_data,
    total_description_length,
)
from .fileio import (
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
from .matching import (
    DatasetMatcher,
    Occurrence,
    OccurrenceError,
    OracleScaleError,
    brute_force_occurrences,
    search_occurrences,
)
from .mining import ConfigError, MinerConfig, MiningReport, final_cover_state, mine
from .model import (
    EMPTY,
    AttributeSchema,
    EventDataset,
    Pattern,
    PatternError,
    SchemaError,
    is_subsequence,
    singleton_pattern,
)
from .synthetic import (
    EvalMetrics,
    GenerationError,
    PlantedTruth,
    SyntheticSpec,
    evaluate,
    evaluate_slots,
    generate_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "AttributeSchema",
    "CodeTable",
    "ConfigError",
    "CoverError",
    "DatasetMatcher",
    "EvalMetrics",
    "EventDataset",
    "GenerationError",
    "MinerConfig",
    "MiningReport",
    "Occurrence",
    "OccurrenceError",
    "OracleScaleError",
    "ParseError",
    "Pattern",
    "PatternError",
    "PatternRecord",
    "PlantedTruth",
    "SchemaError",
    "SequenceCover",
    "SyntheticSpec",
    "UndefinedCodeLengthError",
    "UsageStats",
    "brute_force_occurrences",
    "cover_sequence",
    "decode_stream",
    "encode_cover",
    "evaluate",
    "evaluate_slots",
    "final_cover_state",
    "generate_dataset",
    "is_subsequence",
    "length_of_data",
    "length_of_model",
    "log2_binomial",
    "mine",
    "new_standard_table",
    "parse_dataset",
    "parse_patterns",
    "parse_truth",
    "search_occurrences",
    "singleton_pattern",
    "total_description_length",
    "universal_int_length",
    "write_dataset",
    "write_patterns",
    "write_report",
    "write_truth",
]
