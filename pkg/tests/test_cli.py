import subprocess
import sys

from transferlab.cli import (
    CSV_HEADER,
    build_parser,
    format_float,
    main,
    read_risk_csv,
    write_risk_csv,
)


def run_cli(*argv):
    return main(list(argv))


def run_process(*argv):
    return subprocess.run(
        [sys.executable, "-m", "transferlab", *argv],
        capture_output=True,
        text=True,
    )


class TestSimulate:
    def test_row_count_and_schema(self, tmp_path):
        out = tmp_path / "r.csv"
        code = run_cli(
            "simulate", "--instance", "1", "--S", "4", "--A", "2",
            "--n", "16,32,64", "--estimators", "mle", "--repeats", "20",
            "--seed", "7", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 4
        assert lines[1].startswith("1,mle,4,2,16,20,")

    def test_byte_identical_reruns(self, tmp_path):
        args = (
            "simulate", "--instance", "0", "--S", "3", "--A", "2",
            "--n", "8,16", "--estimators", "mle,empsel", "--repeats", "25",
            "--seed", "3",
        )
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        assert run_cli(*args, "--out", str(first)) == 0
        assert run_cli(*args, "--out", str(second), "--workers", "3") == 0
        assert first.read_bytes() == second.read_bytes()

    def test_burn_in_violation_exits_one(self, tmp_path, capsys):
        code = run_cli(
            "simulate", "--instance", "2", "--S", "10", "--A", "4",
            "--n", "3", "--out", str(tmp_path / "x.csv"),
        )
        assert code == 1
        assert "below burn-in" in capsys.readouterr().err

    def test_unknown_estimator_exits_one(self, tmp_path, capsys):
        code = run_cli(
            "simulate", "--instance", "0", "--S", "2", "--A", "2",
            "--n", "4", "--estimators", "magic", "--out", str(tmp_path / "x.csv"),
        )
        assert code == 1
        assert "unknown estimator" in capsys.readouterr().err


class TestCsvRoundTrip:
    def test_parse_then_serialize_is_identity(self, tmp_path):
        out = tmp_path / "r.csv"
        run_cli(
            "simulate", "--instance", "3", "--S", "3", "--A", "3",
            "--n", "9,18,36", "--estimators", "fullkl,empsel", "--repeats", "30",
            "--seed", "11", "--out", str(out),
        )
        table = read_risk_csv(out)
        rewritten = tmp_path / "rw.csv"
        write_risk_csv(rewritten, table)
        assert rewritten.read_bytes() == out.read_bytes()

    def test_seventeen_digits_round_trip(self):
        for x in (0.1, 1 / 3, 0.24999999999999997, 5.3e-17):
            assert float(format_float(x)) == x

    def test_malformed_header_rejected(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("nope\n1,mle,1,2,3,4,0.5,0.1,0\n")
        code = run_cli("rates", "--in", str(bad))
        assert code == 1
        assert "header" in capsys.readouterr().err


class TestRates:
    def synthetic_csv(self, tmp_path, rows):
        path = tmp_path / "synthetic.csv"
        lines = [CSV_HEADER]
        for instance, estimator, n, risk in rows:
            lines.append(f"{instance},{estimator},4,2,{n},100,{risk},0.001,0")
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_exact_decay_reports_minus_one(self, tmp_path, capsys):
        path = self.synthetic_csv(
            tmp_path,
            [(1, "mle", 10, 0.1), (1, "mle", 100, 0.01), (1, "mle", 1000, 0.001)],
        )
        assert run_cli("rates", "--in", str(path)) == 0
        out = capsys.readouterr().out
        assert "slope: -1" in out
        assert "instance: 1" in out
        assert "estimator: mle" in out

    def test_filter_selects_single_estimator(self, tmp_path, capsys):
        rows = [(1, "mle", n, 1.0 / n) for n in (10, 100, 1000)]
        rows += [(1, "empsel", n, 1.0 / n**2) for n in (10, 100, 1000)]
        path = self.synthetic_csv(tmp_path, rows)
        assert run_cli("rates", "--in", str(path), "--estimators", "mle") == 0
        out = capsys.readouterr().out
        assert "estimator: mle" in out
        assert "empsel" not in out

    def test_empty_filter_exits_one(self, tmp_path, capsys):
        rows = [(1, "mle", n, 1.0 / n) for n in (10, 100, 1000)]
        path = self.synthetic_csv(tmp_path, rows)
        code = run_cli("rates", "--in", str(path), "--estimators", "fullkl")
        assert code == 1
        assert "no rows match" in capsys.readouterr().err

    def test_insufficient_points_exits_one(self, tmp_path, capsys):
        rows = [(1, "mle", 10, 0.1), (1, "mle", 100, 0.01)]
        path = self.synthetic_csv(tmp_path, rows)
        assert run_cli("rates", "--in", str(path)) == 1
        assert "3" in capsys.readouterr().err

    def test_report_written_to_file(self, tmp_path):
        rows = [(2, "empsel", n, 1.0 / n) for n in (10, 100, 1000)]
        path = self.synthetic_csv(tmp_path, rows)
        report = tmp_path / "report.txt"
        assert run_cli("rates", "--in", str(path), "--out", str(report)) == 0
        text = report.read_text()
        assert text.startswith("instance: 2\nestimator: empsel\n")
        assert "r_squared: 1" in text


class TestInstanceDump:
    def test_i3_rho_line(self, capsys):
        assert run_cli("instance-dump", "--instance", "3", "--S", "3", "--A", "3", "--n", "9") == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "rho:"
        assert lines[1] == "0.100000 0.100000 0.800000"

    def test_i0_rows(self, capsys):
        assert run_cli("instance-dump", "--instance", "0", "--S", "2", "--A", "2") == 0
        out = capsys.readouterr().out.splitlines()
        assert out[3] == "0.750000 0.250000"
        assert out[4] == "0.250000 0.750000"

    def test_invalid_spec_exits_one(self, capsys):
        code = run_cli("instance-dump", "--instance", "1", "--S", "8", "--A", "8", "--n", "3")
        assert code == 1
        assert "burn-in" in capsys.readouterr().err


class TestVerify:
    def test_closed_forms_scope_passes(self, capsys):
        code = run_cli("verify", "--scope", "closed-forms", "--step", "0.02", "--seed", "1")
        out = capsys.readouterr().out
        assert code == 0
        assert "PASS" in out
        assert "FAIL" not in out

    def test_exact_risk_scope_passes_small(self, capsys):
        code = run_cli("verify", "--scope", "exact-risk", "--seed", "1", "--repeats", "20000")
        out = capsys.readouterr().out
        assert code == 0
        assert "exact-risk/mle/S1A2n2-fair-coin" in out

    def test_bad_scope_is_usage_error(self):
        result = run_process("verify", "--scope", "bogus")
        assert result.returncode == 2

    def test_missing_subcommand_is_usage_error(self):
        result = run_process()
        assert result.returncode == 2


class TestParser:
    def test_defaults(self):
        parser = build_parser()
        args = parser.parse_args(
            ["simulate", "--instance", "0", "--S", "2", "--A", "2", "--n", "4", "--out", "x"]
        )
        assert args.repeats == 2000
        assert args.workers == 1
        assert args.seed == 0
        assert set(args.estimators.split(",")) == {"mle", "empce", "empsel", "fullkl"}
