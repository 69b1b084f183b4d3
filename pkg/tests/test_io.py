"""File formats and the command-line surface."""

import json

import pytest

from seqmine import (
    EMPTY,
    AttributeSchema,
    EventDataset,
    ParseError,
    Pattern,
    PatternRecord,
    SyntheticSpec,
    generate_dataset,
    parse_dataset,
    parse_patterns,
    parse_truth,
    write_dataset,
    write_patterns,
    write_report,
    write_truth,
)
from seqmine.cli import entrypoint
from seqmine.fileio import BENCH_REPORT_COLUMNS, RUN_REPORT_COLUMNS
from seqmine.synthetic import PlantedTruth

SCHEMA = AttributeSchema(
    ("color", "shape"),
    (("red", "green", "blue"), ("disc", "ring")),
)


def tiny_dataset():
    return EventDataset(SCHEMA, (((0, 0), (2, 1)), ((1, 1),)))


class TestDatasetFormat:
    def test_round_trip(self, tmp_path):
        path = str(tmp_path / "d.txt")
        write_dataset(tiny_dataset(), path)
        assert parse_dataset(path) == tiny_dataset()

    def test_written_text_is_readable(self, tmp_path):
        path = str(tmp_path / "d.txt")
        write_dataset(tiny_dataset(), path)
        lines = (tmp_path / "d.txt").read_text().splitlines()
        assert lines[0] == "#format 1"
        assert lines[1] == "#attr color: red,green,blue"
        assert lines[2] == "#attr shape: disc,ring"
        assert lines[3] == "red,disc;blue,ring"
        assert lines[4] == "green,ring"

    def test_generated_round_trip(self, tmp_path):
        dataset, _ = generate_dataset(
            SyntheticSpec(num_sequences=6, sequence_length=8, num_attributes=2,
                          values_per_attribute=9, num_patterns=1,
                          values_per_pattern=2, coverage_fraction=0.2,
                          planted_misses_per_pattern=0, seed=7)
        )
        path = str(tmp_path / "gen.txt")
        write_dataset(dataset, path)
        assert parse_dataset(path) == dataset

    def write_and_parse(self, tmp_path, text):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        return parse_dataset(str(path))

    def test_missing_format_line(self, tmp_path):
        with pytest.raises(ParseError) as err:
            self.write_and_parse(tmp_path, "#attr a: x,y\nx\n")
        assert err.value.line_no == 1

    def test_empty_file(self, tmp_path):
        with pytest.raises(ParseError, match="empty file"):
            self.write_and_parse(tmp_path, "")

    def test_no_attr_lines(self, tmp_path):
        with pytest.raises(ParseError, match="no #attr"):
            self.write_and_parse(tmp_path, "#format 1\n")

    def test_unknown_value_names_line(self, tmp_path):
        with pytest.raises(ParseError, match="unknown value 'z'") as err:
            self.write_and_parse(tmp_path, "#format 1\n#attr a: x,y\nx\nz\n")
        assert err.value.line_no == 4

    def test_ragged_event(self, tmp_path):
        text = "#format 1\n#attr a: x,y\n#attr b: u,v\nx,u;x\n"
        with pytest.raises(ParseError, match="event 2"):
            self.write_and_parse(tmp_path, text)

    def test_unexpected_directive(self, tmp_path):
        text = "#format 1\n#attr a: x,y\n#bogus\n"
        with pytest.raises(ParseError, match="#bogus"):
            self.write_and_parse(tmp_path, text)

    def test_no_sequences(self, tmp_path):
        with pytest.raises(ParseError, match="no sequences"):
            self.write_and_parse(tmp_path, "#format 1\n#attr a: x,y\n")

    def test_reserved_characters_rejected_on_write(self, tmp_path):
        bad = AttributeSchema(("a,b",), (("x", "y"),))
        with pytest.raises(ValueError, match="delimiters"):
            write_dataset(EventDataset(bad, (((0,),),)), str(tmp_path / "d"))
        bad_value = AttributeSchema(("a",), (("x", "y#"),))
        with pytest.raises(ValueError, match="delimiters"):
            write_dataset(EventDataset(bad_value, (((0,),),)), str(tmp_path / "d"))


class TestPatternFormat:
    def records(self):
        return [
            PatternRecord(
                Pattern(((0, EMPTY), (2, 1))),
                usage=3,
                support=4,
                misses=[(0, 2, 1), (5, 0, 0)],
            ),
            PatternRecord(Pattern(((1, 0),)), usage=1, support=1),
        ]

    def test_round_trip(self, tmp_path):
        path = str(tmp_path / "p.txt")
        write_patterns(path, SCHEMA, self.records(), {"delta": "12.5"})
        schema, records, meta = parse_patterns(path)
        assert schema == SCHEMA
        assert records == self.records()
        assert meta == {"delta": "12.5"}

    def test_empty_slot_is_starred(self, tmp_path):
        path = tmp_path / "p.txt"
        write_patterns(str(path), SCHEMA, self.records())
        assert "red,*" in path.read_text().splitlines()

    def parse_text(self, tmp_path, body):
        path = tmp_path / "p.txt"
        path.write_text("#format 1\n#attr a: x,y\n" + body)
        return parse_patterns(str(path))

    def test_miss_outside_block(self, tmp_path):
        with pytest.raises(ParseError, match="outside"):
            self.parse_text(tmp_path, "#miss seq=0 event=1 attr=0\n")

    def test_event_row_outside_block(self, tmp_path):
        with pytest.raises(ParseError, match="outside"):
            self.parse_text(tmp_path, "x\n")

    def test_unknown_directive(self, tmp_path):
        with pytest.raises(ParseError, match="#frob"):
            self.parse_text(tmp_path, "#frob 1\n")

    def test_block_without_rows(self, tmp_path):
        with pytest.raises(ParseError, match="no event rows"):
            self.parse_text(tmp_path, "#pattern usage=1 support=1\n")

    def test_bad_kv_field(self, tmp_path):
        with pytest.raises(ParseError, match="usage="):
            self.parse_text(tmp_path, "#pattern count=1 support=1\nx\n")
        with pytest.raises(ParseError, match="bad integer"):
            self.parse_text(tmp_path, "#pattern usage=one support=1\nx\n")

    def test_meta_needs_equals(self, tmp_path):
        with pytest.raises(ParseError, match="key=value"):
            self.parse_text(tmp_path, "#meta broken\n")


class TestTruthFormat:
    def test_round_trip(self, tmp_path):
        truth = PlantedTruth(
            patterns=[Pattern(((0, 1), (1, EMPTY)))],
            occurrences=[(0, 2, (1, 3)), (0, 5, (0, 1))],
            planted_misses=[(0, 2, 3, 0, 7)],
        )
        path = str(tmp_path / "t.json")
        write_truth(path, truth)
        got = parse_truth(path)
        assert got.patterns == truth.patterns
        assert got.occurrences == truth.occurrences
        assert got.planted_misses == truth.planted_misses

    def test_rejects_bad_json(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text("{nope")
        with pytest.raises(ParseError, match="bad JSON"):
            parse_truth(str(path))

    def test_rejects_unknown_format(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text(json.dumps({"format": 2}))
        with pytest.raises(ParseError, match="unknown truth format"):
            parse_truth(str(path))

    def test_rejects_missing_fields(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text(json.dumps({"format": 1, "patterns": []}))
        with pytest.raises(ParseError, match="missing field"):
            parse_truth(str(path))


class TestReportFormat:
    def test_floats_use_two_decimals(self, tmp_path):
        path = tmp_path / "r.tsv"
        row = {"|P|": 5, "dL%": 23.8012, "miss": 11, "t(s)": 4.25}
        write_report(str(path), [row], RUN_REPORT_COLUMNS)
        lines = path.read_text().splitlines()
        assert lines[0] == "|P|\tdL%\tmiss\tt(s)"
        assert lines[1] == "5\t23.80\t11\t4.25"

    def test_missing_cell_left_blank(self, tmp_path):
        path = tmp_path / "r.tsv"
        write_report(str(path), [{"variant": "full"}], BENCH_REPORT_COLUMNS)
        cells = path.read_text().splitlines()[1].split("\t")
        assert cells[0] == "full"
        assert set(cells[1:]) == {""}


GEN_ARGS = [
    "--sequences", "12", "--length", "12", "--attrs", "3", "--values", "25",
    "--plant", "2", "--pattern-values", "4", "--coverage", "0.15",
    "--misses", "1", "--seed", "3",
]


class TestCommandLine:
    def test_gen_mine_eval_pipeline(self, tmp_path, capsys):
        data = str(tmp_path / "data.txt")
        truth = str(tmp_path / "truth.json")
        mined = str(tmp_path / "mined.txt")
        report = str(tmp_path / "run.tsv")

        assert entrypoint(["gen", *GEN_ARGS, "--out", data,
                           "--truth-out", truth]) == 0
        assert entrypoint(["mine", "--input", data, "--output", mined,
                           "--report", report, "--seed", "3"]) == 0
        assert (tmp_path / "run.tsv").exists()
        assert (tmp_path / "run.png").exists()
        header = (tmp_path / "run.tsv").read_text().splitlines()[0]
        assert header == "\t".join(RUN_REPORT_COLUMNS)

        schema, records, meta = parse_patterns(mined)
        assert schema.arity == 3
        assert records, "mining found nothing on an easy planted dataset"
        assert "delta_l_percent" in meta

        ev_report = str(tmp_path / "eval.tsv")
        assert entrypoint(["eval", "--mined", mined, "--truth", truth,
                           "--report", ev_report]) == 0
        out = capsys.readouterr().out
        assert "recovery=" in out and "miss_det=" in out
        assert (tmp_path / "eval.tsv").exists()

    def test_mine_report_miss_slots_round_trip(self, tmp_path):
        data = str(tmp_path / "data.txt")
        mined = str(tmp_path / "mined.txt")
        assert entrypoint(["gen", *GEN_ARGS, "--out", data]) == 0
        assert entrypoint(["mine", "--input", data, "--output", mined,
                           "--seed", "3"]) == 0
        _schema, records, _meta = parse_patterns(mined)
        dataset = parse_dataset(data)
        for rec in records:
            for s, e, k in rec.misses:
                assert 0 <= s < dataset.num_sequences
                assert 0 <= e < len(dataset.sequences[s])
                assert 0 <= k < dataset.schema.arity

    def test_bench_grid(self, tmp_path):
        report = str(tmp_path / "bench.tsv")
        code = entrypoint([
            "bench", "--sequences", "10", "--length", "12", "--attrs", "3",
            "--values", "25", "--plant", "2", "--pattern-values", "4",
            "--coverage", "0.15", "--misses", "1", "--seed", "3",
            "--variants", "full,none", "--report", report,
        ])
        assert code == 0
        lines = (tmp_path / "bench.tsv").read_text().splitlines()
        assert lines[0] == "\t".join(BENCH_REPORT_COLUMNS)
        assert len(lines) == 3
        assert lines[1].startswith("full\t10\t12\t3\t25")
        assert lines[2].startswith("none\t")
        assert (tmp_path / "bench.png").exists()

    def test_missing_input_is_exit_2(self, tmp_path, capsys):
        code = entrypoint(["mine", "--input", str(tmp_path / "nope.txt"),
                           "--output", str(tmp_path / "out.txt")])
        assert code == 2
        assert "input error" in capsys.readouterr().err

    def test_corrupt_input_is_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("#format 99\n")
        code = entrypoint(["mine", "--input", str(bad),
                           "--output", str(tmp_path / "out.txt")])
        assert code == 2
        assert "input error" in capsys.readouterr().err

    def test_unknown_flag_is_exit_3(self, tmp_path, capsys):
        code = entrypoint(["gen", "--frobnicate", "--out", str(tmp_path / "d")])
        assert code == 3
        assert "configuration error" in capsys.readouterr().err

    def test_bad_generator_shape_is_exit_3(self, tmp_path, capsys):
        code = entrypoint(["gen", "--sequences", "0",
                           "--out", str(tmp_path / "d")])
        assert code == 3
        assert "configuration error" in capsys.readouterr().err

    def test_unknown_bench_variant_is_exit_3(self, tmp_path, capsys):
        code = entrypoint([
            "bench", "--sequences", "6", "--length", "8", "--attrs", "2",
            "--values", "9", "--plant", "1", "--pattern-values", "2",
            "--coverage", "0.2", "--misses", "0",
            "--variants", "turbo", "--report", str(tmp_path / "b.tsv"),
        ])
        assert code == 3
        assert "turbo" in capsys.readouterr().err
