import csv
from datetime import datetime

import pytest

from conftest import make_workflow_log
from procsim import import_pnml, parse_csv, parse_profile, write_csv
from procsim.cli import main


@pytest.fixture(scope="module")
def log_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "log.csv"
    path.write_text(write_csv(make_workflow_log(num_traces=60, seed=2)), newline="")
    return path


def run(*argv) -> int:
    return main([str(a) for a in argv])


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


class TestDiscover:
    def test_writes_net_and_profile(self, tmp_path, log_file, capsys):
        pnml = tmp_path / "net.pnml"
        profile_path = tmp_path / "profile.ini"
        code = run("discover", "--in", log_file, "--pnml", pnml, "--profile", profile_path)
        assert code == 0
        out = capsys.readouterr().out
        assert "activities" in out and "traces" in out

        net = import_pnml(pnml.read_text())
        assert set(net.transitions) == {f"t_{x}" for x in "abcdefgh"}
        profile = parse_profile(profile_path.read_text())
        assert set(profile.activity_durations) == set("abcdefgh")
        assert profile.max_len == 7  # eight activities, but b/c exclude each other

    def test_missing_required_flag_is_a_usage_error(self, tmp_path, log_file, capsys):
        assert run("discover", "--in", log_file, "--pnml", tmp_path / "n.pnml") == 1
        assert "profile" in capsys.readouterr().err

    def test_unreadable_input_is_an_io_error(self, tmp_path, capsys):
        code = run(
            "discover",
            "--in", tmp_path / "missing.csv",
            "--pnml", tmp_path / "n.pnml",
            "--profile", tmp_path / "p.ini",
        )
        assert code == 2

    def test_malformed_log_is_a_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("case_id,activity,timestamp\n1,a,yesterday\n")
        code = run(
            "discover",
            "--in", bad,
            "--pnml", tmp_path / "n.pnml",
            "--profile", tmp_path / "p.ini",
        )
        assert code == 2
        assert "line 2" in capsys.readouterr().err

    def test_single_trace_needs_an_arrival_override(self, tmp_path, capsys):
        one = tmp_path / "one.csv"
        one.write_text(
            "case_id,activity,timestamp\n"
            "1,a,2024-01-01 09:00:00\n"
            "1,b,2024-01-01 09:05:00\n"
        )
        base = [
            "discover",
            "--in", one, "--pnml", tmp_path / "n.pnml",
            "--profile", tmp_path / "p.ini",
        ]
        assert run(*base) == 2
        assert "at least 2 traces" in capsys.readouterr().err
        assert run(*base, "--arrival", 300) == 0
        profile = parse_profile((tmp_path / "p.ini").read_text())
        assert profile.inter_arrival.params == {"mean": 300.0, "sd": 30.0}

    def test_empty_file_is_a_data_error(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        code = run(
            "discover",
            "--in", empty,
            "--pnml", tmp_path / "n.pnml",
            "--profile", tmp_path / "p.ini",
        )
        assert code == 2
        assert "header" in capsys.readouterr().err

    def test_business_hours_flag_lands_in_profile(self, tmp_path, log_file):
        profile_path = tmp_path / "p.ini"
        code = run(
            "discover",
            "--in", log_file,
            "--pnml", tmp_path / "n.pnml",
            "--profile", profile_path,
            "--business-hours", "24/7",
        )
        assert code == 0
        assert parse_profile(profile_path.read_text()).calendar.mode == "always_on"


class TestSimulate:
    def test_two_phase_run_produces_the_requested_cases(self, tmp_path, log_file):
        pnml = tmp_path / "net.pnml"
        profile_path = tmp_path / "p.ini"
        out = tmp_path / "sim.csv"
        assert run("discover", "--in", log_file, "--pnml", pnml, "--profile", profile_path) == 0
        assert (
            run(
                "simulate",
                "--pnml", pnml,
                "--profile", profile_path,
                "--out", out,
                "--cases", 25,
                "--seed", 3,
            )
            == 0
        )
        rows = read_rows(out)
        assert {row["case_id"] for row in rows} == {str(i) for i in range(1, 26)}
        assert set(rows[0]) == {"case_id", "activity", "timestamp", "start_timestamp"}

    def test_one_shot_equals_two_phase(self, tmp_path, log_file):
        pnml = tmp_path / "net.pnml"
        profile_path = tmp_path / "p.ini"
        direct = tmp_path / "direct.csv"
        staged = tmp_path / "staged.csv"
        assert run("discover", "--in", log_file, "--pnml", pnml, "--profile", profile_path) == 0
        assert run("simulate", "--in", log_file, "--out", direct, "--cases", 30, "--seed", 11) == 0
        assert (
            run(
                "simulate",
                "--pnml", pnml,
                "--profile", profile_path,
                "--out", staged,
                "--cases", 30,
                "--seed", 11,
            )
            == 0
        )
        assert direct.read_bytes() == staged.read_bytes()

    def test_same_seed_reruns_byte_identical(self, tmp_path, log_file):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        for out in (first, second):
            assert run("simulate", "--in", log_file, "--out", out, "--cases", 40, "--seed", 5) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_changing_the_seed_changes_the_output(self, tmp_path, log_file):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        assert run("simulate", "--in", log_file, "--out", first, "--cases", 40, "--seed", 5) == 0
        assert run("simulate", "--in", log_file, "--out", second, "--cases", 40, "--seed", 6) == 0
        assert first.read_bytes() != second.read_bytes()

    def test_zero_cases_writes_a_header_only_csv(self, tmp_path, log_file):
        out = tmp_path / "none.csv"
        assert run("simulate", "--in", log_file, "--out", out, "--cases", 0) == 0
        assert out.read_text() == "case_id,activity,timestamp,start_timestamp\n"

    def test_no_start_column_flag(self, tmp_path, log_file):
        out = tmp_path / "plain.csv"
        assert (
            run(
                "simulate",
                "--in", log_file,
                "--out", out,
                "--cases", 5,
                "--no-start-column",
            )
            == 0
        )
        header = out.read_text().splitlines()[0]
        assert header == "case_id,activity,timestamp"

    def test_duration_and_capacity_overrides(self, tmp_path, log_file):
        out = tmp_path / "flat.csv"
        args = ["simulate", "--in", log_file, "--out", out, "--cases", 6, "--seed", 1]
        for activity in "abcdefgh":
            args += ["--duration", f"{activity}=60"]
            args += ["--capacity", f"{activity}=1000000"]
        args += ["--arrival", "100000"]
        assert run(*args) == 0
        for row in read_rows(out):
            begun = datetime.strptime(row["start_timestamp"], "%Y-%m-%d %H:%M:%S")
            finished = datetime.strptime(row["timestamp"], "%Y-%m-%d %H:%M:%S")
            assert (finished - begun).total_seconds() == 60.0

    def test_business_hours_timestamps_stay_in_windows(self, tmp_path, log_file):
        out = tmp_path / "office.csv"
        assert (
            run(
                "simulate",
                "--in", log_file,
                "--out", out,
                "--cases", 20,
                "--business-hours", "Mon-Fri 09:00-17:00",
                "--anchor", "2024-01-01 09:00:00",
            )
            == 0
        )
        for row in read_rows(out):
            stamp = datetime.strptime(row["timestamp"], "%Y-%m-%d %H:%M:%S")
            assert stamp.weekday() < 5
            assert 9 <= stamp.hour < 17

    def test_bad_flag_value_is_a_usage_error(self, tmp_path, log_file, capsys):
        out = tmp_path / "x.csv"
        assert run("simulate", "--in", log_file, "--out", out, "--cases", "many") == 1
        assert run("simulate", "--in", log_file, "--out", out, "--duration", "a:60") == 1
        assert run("simulate", "--in", log_file, "--out", out, "--anchor", "noonish") == 1
        capsys.readouterr()

    def test_needs_either_log_or_net_and_profile(self, tmp_path, capsys):
        assert run("simulate", "--out", tmp_path / "x.csv") == 1
        err = capsys.readouterr().err
        assert "--in" in err or "--pnml" in err

    def test_giving_both_modes_is_rejected(self, tmp_path, log_file, capsys):
        assert (
            run(
                "simulate",
                "--in", log_file,
                "--pnml", tmp_path / "n.pnml",
                "--profile", tmp_path / "p.ini",
                "--out", tmp_path / "x.csv",
            )
            == 1
        )
        capsys.readouterr()

    def test_unknown_flag_is_a_usage_error(self, capsys):
        assert run("simulate", "--frobnicate") == 1
        capsys.readouterr()

    def test_run_summary_goes_to_stdout(self, tmp_path, log_file, capsys):
        out = tmp_path / "x.csv"
        assert run("simulate", "--in", log_file, "--out", out, "--cases", 10) == 0
        printed = capsys.readouterr().out
        assert "cases" in printed
        assert "wait" in printed


class TestConfigFile:
    def test_flags_win_over_config_values(self, tmp_path, log_file):
        config = tmp_path / "sim.cfg"
        config.write_text("cases = 7\nseed = 1\n")
        out = tmp_path / "out.csv"
        assert (
            run(
                "simulate",
                "--in", log_file,
                "--out", out,
                "--config", config,
                "--cases", 3,
            )
            == 0
        )
        assert {row["case_id"] for row in read_rows(out)} == {"1", "2", "3"}

    def test_config_supplies_defaults(self, tmp_path, log_file):
        config = tmp_path / "sim.cfg"
        config.write_text(
            "# simulation settings\n"
            "cases = 4\n"
            "seed = 9\n"
            f"in = {log_file}\n"
        )
        out = tmp_path / "out.csv"
        assert run("simulate", "--out", out, "--config", config) == 0
        assert {row["case_id"] for row in read_rows(out)} == {"1", "2", "3", "4"}

    def test_repeatable_keys_accumulate_in_config(self, tmp_path, log_file):
        config = tmp_path / "sim.cfg"
        config.write_text("duration = a=60\nduration = b=60\n")
        out = tmp_path / "out.csv"
        assert (
            run(
                "simulate", "--in", log_file, "--out", out,
                "--cases", 3, "--config", config,
            )
            == 0
        )
        seconds = {}
        for row in read_rows(out):
            begun = datetime.strptime(row["start_timestamp"], "%Y-%m-%d %H:%M:%S")
            finished = datetime.strptime(row["timestamp"], "%Y-%m-%d %H:%M:%S")
            seconds.setdefault(row["activity"], set()).add(
                (finished - begun).total_seconds()
            )
        assert seconds["a"] == {60.0}
        assert seconds["b"] == {60.0}

    def test_unknown_config_key_is_a_usage_error(self, tmp_path, log_file, capsys):
        config = tmp_path / "sim.cfg"
        config.write_text("verbosity = 9\n")
        assert (
            run(
                "simulate", "--in", log_file, "--out", tmp_path / "x.csv",
                "--config", config,
            )
            == 1
        )
        assert "verbosity" in capsys.readouterr().err


class TestVersionAndHelp:
    def test_version_exits_zero(self, capsys):
        assert run("--version") == 0
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert run("--help") == 0
        assert run("simulate", "--help") == 0
        capsys.readouterr()

    def test_no_arguments_is_a_usage_error(self, capsys):
        assert run() == 1
        capsys.readouterr()
