import json
from fractions import Fraction

import pytest

from constants import ExperimentKind, SpacingKind, SweepConstants
from exceptions import ResultsFormatError
from experiments import McConfig, mc_run, qr_sweep, summarize
from results_io import read_results, records_csv, summary_path, write_results


@pytest.fixture
def qr_summary():
    return qr_sweep(5, 12, extra_thresholds=[Fraction(1, 2)])


@pytest.fixture
def mc_summary():
    cfg = McConfig(mode=SpacingKind.QR, trials=4, window=40, prime_lo=10**12, prime_hi=10**13, seed=3)
    return mc_run(cfg)


def rewrite_line(path, index, transform):
    lines = path.read_text().splitlines()
    lines[index] = transform(lines[index])
    path.write_text("\n".join(lines) + "\n")


def set_field(line, index, value):
    fields = line.split(",")
    fields[index] = value
    return ",".join(fields)


class TestWrite:
    def test_csv_row_for_eleven(self):
        lines = records_csv(qr_sweep(11, 1)).splitlines()
        assert lines[0] == "p,period_length,complexity,normalized_decimal,normalized_rational"
        assert lines[1] == "11,4,3,0.750000,3/4"

    def test_monte_carlo_columns(self, mc_summary):
        header, first = records_csv(mc_summary).splitlines()[:2]
        assert header.endswith(",A,hits,resamples")
        r = mc_summary.records[0]
        assert first.split(",")[5:] == [str(r.window_start), str(r.hits), str(r.resamples)]

    def test_writes_csv_and_summary(self, tmp_path, qr_summary):
        path = tmp_path / "nested" / "qr.csv"
        write_results(qr_summary, path)
        assert path.read_text() == records_csv(qr_summary)
        document = json.loads(summary_path(path).read_text())
        assert document["kind"] == "qr-sweep"
        assert document["record_count"] == 12
        assert document["tallies"]["19/20"] == qr_summary.tallies_at[Fraction(19, 20)]
        assert document["tallies_above"]["19/20"] == qr_summary.tally_above(Fraction(19, 20))
        assert document["metadata"]["first_prime"] == 5

    def test_dash_streams_to_stdout(self, tmp_path, monkeypatch, capsys, qr_summary):
        monkeypatch.chdir(tmp_path)
        write_results(qr_summary, "-")
        assert capsys.readouterr().out == records_csv(qr_summary)
        assert list(tmp_path.iterdir()) == []

    def test_unwritable_path(self, tmp_path, qr_summary):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(OSError):
            write_results(qr_summary, blocker / "qr.csv")


class TestRead:
    def test_round_trip_sweep(self, tmp_path, qr_summary):
        path = tmp_path / "qr.csv"
        write_results(qr_summary, path)
        assert read_results(path) == qr_summary

    def test_round_trip_monte_carlo(self, tmp_path, mc_summary):
        path = tmp_path / "mc.csv"
        write_results(mc_summary, path)
        assert read_results(path) == mc_summary

    def test_empty_summary(self, tmp_path):
        empty = summarize(ExperimentKind.PR_SWEEP, [], SweepConstants.PR_THRESHOLDS)
        path = tmp_path / "empty.csv"
        write_results(empty, path)
        assert path.read_text().count("\n") == 1
        restored = read_results(path)
        assert restored.records == ()
        assert restored == empty

    def test_bad_integer_names_line_and_field(self, tmp_path, qr_summary):
        path = tmp_path / "qr.csv"
        write_results(qr_summary, path)
        rewrite_line(path, 2, lambda line: set_field(line, 2, "x"))
        with pytest.raises(ResultsFormatError) as excinfo:
            read_results(path)
        assert excinfo.value.line == 3
        assert excinfo.value.field == "complexity"

    def test_inconsistent_rational(self, tmp_path, qr_summary):
        path = tmp_path / "qr.csv"
        write_results(qr_summary, path)
        rewrite_line(path, 1, lambda line: line.rsplit(",", 1)[0] + ",1/3")
        with pytest.raises(ResultsFormatError) as excinfo:
            read_results(path)
        assert excinfo.value.field == "normalized_rational"

    def test_missing_column(self, tmp_path, qr_summary):
        path = tmp_path / "qr.csv"
        write_results(qr_summary, path)
        rewrite_line(path, 0, lambda line: line.replace("complexity,", "L,", 1))
        with pytest.raises(ResultsFormatError, match="missing columns: complexity"):
            read_results(path)

    def test_tampered_tally(self, tmp_path, qr_summary):
        path = tmp_path / "qr.csv"
        write_results(qr_summary, path)
        document = json.loads(summary_path(path).read_text())
        document["tallies"]["1/1"] += 1
        summary_path(path).write_text(json.dumps(document))
        with pytest.raises(ResultsFormatError, match="stored tally at 1/1"):
            read_results(path)

    def test_broken_json(self, tmp_path, qr_summary):
        path = tmp_path / "qr.csv"
        write_results(qr_summary, path)
        summary_path(path).write_text("{\n  \"kind\": ")
        with pytest.raises(ResultsFormatError):
            read_results(path)

    def test_missing_summary_file(self, tmp_path, qr_summary):
        path = tmp_path / "qr.csv"
        write_results(qr_summary, path)
        summary_path(path).unlink()
        with pytest.raises(OSError):
            read_results(path)
