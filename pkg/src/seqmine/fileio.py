"""Line-oriented text formats for datasets, pattern sets, reports, truth.

All files start with `#format 1`.  Datasets carry their schema in
`#attr` header lines; one sequence per line, events split by `;`,
values by `,` in attribute order.  Pattern files reuse the schema
header and list one grid block per pattern with `*` for empty slots.
Reports are plain TSV.  Planted truth is JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .model import EMPTY, AttributeSchema, EventDataset, Pattern
from .synthetic import PlantedTruth

FORMAT_LINE = "#format 1"
_RESERVED = set(",;:*#")


class ParseError(ValueError):
    def __init__(self, path: str, line_no: int, message: str) -> None:
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


def _check_schema_names(schema: AttributeSchema) -> None:
    for name in schema.names:
        if not name or any(c in _RESERVED for c in name):
            raise ValueError(f"attribute name {name!r} clashes with format delimiters")
    for row in schema.values:
        for v in row:
            if not v or any(c in _RESERVED for c in v):
                raise ValueError(f"value name {v!r} clashes with format delimiters")


def _schema_header(schema: AttributeSchema) -> list[str]:
    return [
        f"#attr {name}: {','.join(vals)}"
        for name, vals in zip(schema.names, schema.values)
    ]


def _parse_header(path: str, lines: list[tuple[int, str]]):
    """Consume `#format` and `#attr` lines; return (schema, rest)."""
    if not lines:
        raise ParseError(path, 1, "empty file")
    no, first = lines[0]
    if first != FORMAT_LINE:
        raise ParseError(path, no, f"expected {FORMAT_LINE!r}, got {first!r}")
    names: list[str] = []
    values: list[tuple[str, ...]] = []
    idx = 1
    while idx < len(lines) and lines[idx][1].startswith("#attr "):
        no, line = lines[idx]
        body = line[len("#attr ") :]
        if ":" not in body:
            raise ParseError(path, no, "attribute line needs 'name: v1,v2,...'")
        name, _, vals = body.partition(":")
        name = name.strip()
        vlist = tuple(v.strip() for v in vals.split(","))
        if not name or any(not v for v in vlist):
            raise ParseError(path, no, "empty attribute or value name")
        names.append(name)
        values.append(vlist)
        idx += 1
    if not names:
        raise ParseError(path, lines[0][0], "no #attr lines in header")
    try:
        schema = AttributeSchema(tuple(names), tuple(values))
    except Exception as exc:
        raise ParseError(path, lines[0][0], str(exc)) from exc
    return schema, lines[idx:]


def _read_lines(path: str) -> list[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    return [(i + 1, line.strip()) for i, line in enumerate(raw) if line.strip()]


# ---------------------------------------------------------------------------
# datasets


def write_dataset(dataset: EventDataset, path: str) -> None:
    _check_schema_names(dataset.schema)
    schema = dataset.schema
    out = [FORMAT_LINE, *_schema_header(schema)]
    for seq in dataset.sequences:
        events = []
        for ev in seq:
            events.append(",".join(schema.values[k][v] for k, v in enumerate(ev)))
        out.append(";".join(events))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def parse_dataset(path: str) -> EventDataset:
    schema, rest = _parse_header(path, _read_lines(path))
    index = [
        {name: vid for vid, name in enumerate(vals)} for vals in schema.values
    ]
    sequences = []
    for no, line in rest:
        if line.startswith("#"):
            raise ParseError(path, no, f"unexpected directive {line.split()[0]!r}")
        events = []
        for col, chunk in enumerate(line.split(";"), start=1):
            parts = [p.strip() for p in chunk.split(",")]
            if len(parts) != schema.arity:
                raise ParseError(
                    path,
                    no,
                    f"event {col}: got {len(parts)} values, schema has {schema.arity}",
                )
            row = []
            for k, name in enumerate(parts):
                vid = index[k].get(name)
                if vid is None:
                    raise ParseError(
                        path,
                        no,
                        f"event {col}: unknown value {name!r} for attribute "
                        f"{schema.names[k]!r}",
                    )
                row.append(vid)
            events.append(tuple(row))
        sequences.append(tuple(events))
    if not sequences:
        raise ParseError(path, rest[-1][0] if rest else 1, "dataset has no sequences")
    return EventDataset(schema, tuple(sequences))


# ---------------------------------------------------------------------------
# pattern sets


@dataclass
class PatternRecord:
    pattern: Pattern
    usage: int = 0
    support: int = 0
    misses: list[tuple[int, int, int]] = field(default_factory=list)


def write_patterns(
    path: str,
    schema: AttributeSchema,
    records: list[PatternRecord],
    meta: dict[str, object] | None = None,
) -> None:
    _check_schema_names(schema)
    out = [FORMAT_LINE, *_schema_header(schema)]
    for key, val in (meta or {}).items():
        out.append(f"#meta {key}={val}")
    for rec in records:
        out.append(f"#pattern usage={rec.usage} support={rec.support}")
        for ev in rec.pattern.events:
            cells = [
                "*" if v == EMPTY else schema.values[k][v] for k, v in enumerate(ev)
            ]
            out.append(",".join(cells))
        for s, e, k in rec.misses:
            out.append(f"#miss seq={s} event={e} attr={k}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def _parse_kv(path: str, no: int, chunk: str, keys: tuple[str, ...]) -> list[int]:
    parts = chunk.split()
    if len(parts) != len(keys):
        raise ParseError(path, no, f"expected fields {keys}")
    out = []
    for part, key in zip(parts, keys):
        if not part.startswith(key + "="):
            raise ParseError(path, no, f"expected {key}=..., got {part!r}")
        try:
            out.append(int(part[len(key) + 1 :]))
        except ValueError as exc:
            raise ParseError(path, no, f"bad integer in {part!r}") from exc
    return out


def parse_patterns(path: str):
    """Returns (schema, records, meta)."""
    schema, rest = _parse_header(path, _read_lines(path))
    index = [
        {name: vid for vid, name in enumerate(vals)} for vals in schema.values
    ]
    meta: dict[str, str] = {}
    records: list[PatternRecord] = []
    rows: list[tuple[int, ...]] = []
    pending: tuple[int, int] | None = None
    pending_miss: list[tuple[int, int, int]] = []

    def flush(no: int) -> None:
        nonlocal pending, rows, pending_miss
        if pending is None:
            return
        if not rows:
            raise ParseError(path, no, "#pattern block has no event rows")
        records.append(
            PatternRecord(Pattern(tuple(rows)), pending[0], pending[1], pending_miss)
        )
        pending, rows, pending_miss = None, [], []

    for no, line in rest:
        if line.startswith("#meta "):
            body = line[len("#meta ") :]
            key, sep, val = body.partition("=")
            if not sep:
                raise ParseError(path, no, "meta line needs key=value")
            meta[key.strip()] = val.strip()
        elif line.startswith("#pattern"):
            flush(no)
            usage, support = _parse_kv(
                path, no, line[len("#pattern") :].strip(), ("usage", "support")
            )
            pending = (usage, support)
        elif line.startswith("#miss"):
            if pending is None:
                raise ParseError(path, no, "#miss outside a #pattern block")
            s, e, k = _parse_kv(
                path, no, line[len("#miss") :].strip(), ("seq", "event", "attr")
            )
            pending_miss.append((s, e, k))
        elif line.startswith("#"):
            raise ParseError(path, no, f"unknown directive {line.split()[0]!r}")
        else:
            if pending is None:
                raise ParseError(path, no, "event row outside a #pattern block")
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != schema.arity:
                raise ParseError(
                    path, no, f"got {len(parts)} cells, schema has {schema.arity}"
                )
            row = []
            for k, name in enumerate(parts):
                if name == "*":
                    row.append(EMPTY)
                    continue
                vid = index[k].get(name)
                if vid is None:
                    raise ParseError(path, no, f"unknown value {name!r}")
                row.append(vid)
            rows.append(tuple(row))
    flush(rest[-1][0] if rest else 1)
    return schema, records, meta


# ---------------------------------------------------------------------------
# reports


def write_report(path: str, rows: list[dict[str, object]], columns: list[str]) -> None:
    out = ["\t".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            val = row.get(col, "")
            if isinstance(val, float):
                cells.append(f"{val:.2f}")
            else:
                cells.append(str(val))
        out.append("\t".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


RUN_REPORT_COLUMNS = ["|P|", "dL%", "miss", "t(s)"]
BENCH_REPORT_COLUMNS = ["variant", "|S|", "|s|", "|A|", "|V|", *RUN_REPORT_COLUMNS]


# ---------------------------------------------------------------------------
# planted truth


def write_truth(path: str, truth: PlantedTruth) -> None:
    doc = {
        "format": 1,
        "patterns": [[list(ev) for ev in p.events] for p in truth.patterns],
        "occurrences": [
            {"pattern": pid, "sequence": s, "events": list(events)}
            for pid, s, events in truth.occurrences
        ],
        "planted_misses": [
            {
                "pattern": pid,
                "sequence": s,
                "event": e,
                "attr": k,
                "substituted": v,
            }
            for pid, s, e, k, v in truth.planted_misses
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def parse_truth(path: str) -> PlantedTruth:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, f"bad JSON: {exc.msg}") from exc
    if doc.get("format") != 1:
        raise ParseError(path, 1, "unknown truth format")
    try:
        patterns = [
            Pattern(tuple(tuple(ev) for ev in rows)) for rows in doc["patterns"]
        ]
        occurrences = [
            (o["pattern"], o["sequence"], tuple(o["events"]))
            for o in doc["occurrences"]
        ]
        misses = [
            (m["pattern"], m["sequence"], m["event"], m["attr"], m["substituted"])
            for m in doc["planted_misses"]
        ]
    except (KeyError, TypeError) as exc:
        raise ParseError(path, 1, f"truth file missing field: {exc}") from exc
    return PlantedTruth(patterns, occurrences, misses)
