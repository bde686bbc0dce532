#!/usr/bin/env python3
"""
Test suite for the qudit-broadcast command line
Covers every subcommand, output formats and exit codes
"""

import json
from unittest.mock import patch

import numpy as np
import pytest

from main import EXIT_INVALID, EXIT_NUMERICS, EXIT_OK, build_parser, main
from qbroadcast.export import state_to_json
from qbroadcast.scan import reproduce_table
from qbroadcast.states import maximally_mixed, mems


@pytest.fixture(autouse=True)
def isolated_environment(tmp_path, monkeypatch):
    """Run each command in an empty directory with logs under tmp_path"""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("QBROADCAST_LOG_DIR", str(tmp_path / "logs"))
    return tmp_path


class TestParser:
    """Argument parsing"""

    def test_requires_subcommand(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_family_choices(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["sweep", "--family", "werner"])

    def test_threshold_arguments(self):
        args = build_parser().parse_args(
            ["threshold", "--family", "tpcs", "--predicate", "bob_local_npt", "--lo", "0", "--hi", "0.2"]
        )
        assert args.tol == 1e-4
        assert args.out == "-"


class TestSweepCommand:
    """sweep subcommand"""

    def test_csv_to_stdout(self, capsys):
        assert main(["sweep", "--family", "mems", "--grid", "r=0.1,0.9"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0].startswith("family,r,broadcast_class")
        assert len(lines) == 3
        assert lines[1].split(",")[2] == "None"
        assert lines[2].split(",")[2] == "SubOptimal"

    def test_json_to_file(self, isolated_environment):
        out = isolated_environment / "sweep.json"
        code = main(["sweep", "--family", "tpcs", "--grid", "alpha=0;gamma=0,1", "--format", "json", "--out", str(out)])
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["metadata"]["family"] == "tpcs"
        assert payload["metadata"]["tolerances"]["criteria_tol"] == 1e-9
        assert len(payload["records"]) == 2

    def test_inadmissible_grid(self, capsys):
        assert main(["sweep", "--family", "tpcs", "--grid", "alpha=0.4;gamma=0,0.5"]) == EXIT_INVALID
        assert "DomainError" in capsys.readouterr().err

    def test_admissible_only_filters(self, capsys):
        code = main(["sweep", "--family", "tpcs", "--grid", "alpha=0.4;gamma=0,0.5", "--admissible-only"])
        assert code == EXIT_OK
        assert len(capsys.readouterr().out.strip().split("\n")) == 2

    def test_malformed_grid(self):
        assert main(["sweep", "--family", "mems", "--grid", "r=a:b:c"]) == EXIT_INVALID

    def test_log_file_written(self, isolated_environment):
        main(["sweep", "--family", "mems", "--grid", "r=0.2"])
        log_file = isolated_environment / "logs" / "qudit-broadcast.log"
        entries = [json.loads(line) for line in log_file.read_text().splitlines() if line.strip()]
        events = [e["event"] for e in entries]
        assert "Command started" in events
        assert "Sweep completed" in events


class TestThresholdCommand:
    """threshold subcommand"""

    def test_mems_root(self, capsys):
        code = main(["threshold", "--family", "mems", "--predicate", "nonlocal_entangled",
                     "--lo", "0", "--hi", "0.5", "--tol", "1e-5"])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["threshold"]["root"] == pytest.approx(0.44757, abs=1e-4)

    def test_fixed_parameter(self, capsys):
        code = main(["threshold", "--family", "tpcs", "--predicate", "nonlocal_entangled", "--axis", "alpha",
                     "--fixed", "gamma=0.7", "--lo", "0", "--hi", "0.15", "--tol", "1e-5"])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["threshold"]["fixed"] == {"gamma": 0.7}
        assert payload["threshold"]["root"] == pytest.approx(0.06, abs=1e-4)

    def test_no_sign_change(self, capsys):
        code = main(["threshold", "--family", "mems", "--predicate", "nonlocal_entangled",
                     "--lo", "0.6", "--hi", "0.9"])
        assert code == EXIT_INVALID
        assert "BracketError" in capsys.readouterr().err


class TestSurveyCommand:
    """survey subcommand"""

    def test_csv(self, capsys):
        assert main(["survey", "--samples", "5", "--seed", "1"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0].startswith("index,purity")
        assert len(lines) == 6

    def test_json_metadata(self, capsys):
        assert main(["survey", "--samples", "4", "--seed", "9", "--format", "json"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["metadata"]["seed"] == 9
        assert "64" in payload["metadata"]["ensemble"]
        assert sum(payload["counts"][k] for k in ("non_broadcastable", "indeterminate")) == 4

    def test_seed_from_configuration(self, capsys, monkeypatch):
        monkeypatch.setenv("QBROADCAST_DEFAULT_SEED", "5")
        main(["survey", "--samples", "3", "--format", "json"])
        first = json.loads(capsys.readouterr().out)
        main(["survey", "--samples", "3", "--seed", "5", "--format", "json"])
        second = json.loads(capsys.readouterr().out)
        assert first["metadata"]["seed"] == 5
        assert first["records"] == second["records"]

    def test_zero_samples(self):
        assert main(["survey", "--samples", "0"]) == EXIT_INVALID


class TestTableCommand:
    """table subcommand"""

    def test_coherence_mems(self, capsys):
        assert main(["table", "--which", "coherence_mems", "--step", "0.1"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["report"]["checks"][0]["max_abs_deviation"] < 1e-10

    def test_scaling_factors(self, capsys):
        assert main(["table", "--which", "scaling_factors", "--samples", "5"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["report"]["checks"]) == 3

    def test_configured_tolerances_reach_table(self, monkeypatch, capsys):
        monkeypatch.setenv("QBROADCAST_CRITERIA_TOL", "1e-7")
        monkeypatch.setenv("QBROADCAST_DISCORD_CLAMP_TOL", "1e-8")
        with patch("main.reproduce_table", wraps=reproduce_table) as spy:
            assert main(["table", "--which", "discord_mems", "--step", "0.25"]) == EXIT_OK
        kwargs = spy.call_args[1]
        assert kwargs["criteria_tol"] == 1e-7
        assert kwargs["discord_clamp_tol"] == 1e-8
        payload = json.loads(capsys.readouterr().out)
        assert payload["metadata"]["tolerances"]["discord_clamp_tol"] == 1e-8

    def test_missing_output_directory(self, isolated_environment, capsys):
        """Unwritable destinations exit with the invalid-input code"""
        code = main(["table", "--which", "local_alice", "--samples", "2", "--out", "results/local_alice.json"])
        assert code == EXIT_INVALID
        assert "OutputError" in capsys.readouterr().err
        assert not (isolated_environment / "results").exists()


class TestBroadcastCommand:
    """broadcast subcommand"""

    def test_mems_state(self, isolated_environment, capsys):
        state = isolated_environment / "mems.json"
        state.write_text(state_to_json(mems(0.9)))
        assert main(["broadcast", "--state", str(state)]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdicts"]["rho_14"]["status"] == "Entangled"
        assert payload["verdicts"]["rho_13"]["status"] == "Separable"
        assert payload["measures"]["rho_14"]["discord"] == pytest.approx(25 * 0.81 / 192)
        assert payload["measures"]["rho_13"]["discord"] == pytest.approx(1 / 18)
        assert payload["input_bloch"]["d"] == 3

    def test_missing_state_file(self, capsys):
        assert main(["broadcast", "--state", "absent.json"]) == EXIT_INVALID
        assert "file not found" in capsys.readouterr().err

    def test_non_physical_state(self, isolated_environment):
        state = isolated_environment / "bad.json"
        state.write_text(json.dumps({"dims": [2, 3], "matrix": {"re": (2 * np.eye(6)).tolist()}}))
        assert main(["broadcast", "--state", str(state)]) == EXIT_INVALID

    def test_numerics_error(self, isolated_environment, capsys):
        state = isolated_environment / "mixed.json"
        state.write_text(state_to_json(maximally_mixed((2, 3))))
        with patch("qbroadcast.measures.np.linalg.eigvalsh", return_value=np.array([0.0, 0.0, 1.0])):
            assert main(["broadcast", "--state", str(state)]) == EXIT_NUMERICS
        assert "numerics error" in capsys.readouterr().err


class TestConfigurationFailures:
    """Invalid configuration stops before any command runs"""

    def test_bad_tolerance(self, monkeypatch, capsys):
        monkeypatch.setenv("QBROADCAST_TRACE_TOL", "loose")
        assert main(["survey", "--samples", "1"]) == EXIT_INVALID
        assert "configuration error" in capsys.readouterr().err

    def test_dotenv_in_working_directory(self, isolated_environment, capsys):
        (isolated_environment / ".env").write_text("QBROADCAST_SIGNIFICANT_DIGITS=6\n")
        assert main(["sweep", "--family", "mems", "--grid", "r=0.3"]) == EXIT_OK
        row = capsys.readouterr().out.strip().split("\n")[1].split(",")
        assert row[1] == "0.3"
        # discord column printed with six significant digits
        assert len(row[12].replace(".", "").lstrip("0")) <= 6


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
