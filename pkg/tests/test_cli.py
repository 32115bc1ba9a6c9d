"""Tests for the ringcore-sim command line."""

import json
from unittest.mock import patch

import pytest

from ringcore_sim import (
    EXIT_ACCEPTANCE,
    EXIT_CONFIG,
    EXIT_INTERRUPTED,
    EXIT_OK,
    EXIT_RUNTIME,
    create_parser,
    main,
)
from ringcore_sim.errors import EstimationError, NoLockError
from ringcore_sim.report import LinkReport


class TestParser:
    """Test cases for argument parsing."""

    def test_experiment_verb(self):
        args = create_parser().parse_args(["ber_grid", "--seed", "4", "--symbols", "8192"])
        assert args.verb == "ber_grid"
        assert args.seed == 4
        assert args.symbols == 8192

    def test_view_verb(self):
        args = create_parser().parse_args(["view", "out"])
        assert args.out_dir == "out"

    def test_verb_required(self):
        with pytest.raises(SystemExit):
            create_parser().parse_args([])


class TestMain:
    """Test cases for the main entry point."""

    def test_schema(self, capsys):
        assert main(["schema"]) == EXIT_OK
        assert '"experiment"' in capsys.readouterr().out

    def test_missing_seed(self, capsys):
        assert main(["budget_check"]) == EXIT_CONFIG
        assert "seed" in capsys.readouterr().err

    def test_bad_config(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"experiment": "budget_check", "seed": 1, "dsp": {"taps": 2}}))
        assert main(["budget_check", "--config", str(path)]) == EXIT_CONFIG
        assert "Configuration error" in capsys.readouterr().err

    def test_bad_log_level(self):
        assert main(["--log-level", "chatty", "schema"]) == EXIT_CONFIG

    def test_budget_check_writes_outputs(self, tmp_path):
        out = tmp_path / "budget"
        assert main(["budget_check", "--seed", "2", "--out", str(out)]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["accepted"] is True
        assert (out / "results.csv").exists()

    def test_acceptance_failure_exit_code(self, tmp_path):
        rejected = LinkReport("budget_check", 2, "00")
        rejected.check("published_budget", False)
        with patch("ringcore_sim.run_experiment", return_value=rejected):
            code = main(["budget_check", "--seed", "2", "--out", str(tmp_path)])
        assert code == EXIT_ACCEPTANCE

    def test_keyboard_interrupt(self, tmp_path):
        with patch("ringcore_sim.run_experiment", side_effect=KeyboardInterrupt):
            code = main(["budget_check", "--seed", "2", "--out", str(tmp_path)])
        assert code == EXIT_INTERRUPTED

    def test_view_launches_browser(self, results_dir):
        with patch("ringcore_sim.app.ResultsViewerApp.run") as mock_run:
            assert main(["view", str(results_dir)]) == EXIT_OK
        mock_run.assert_called_once()


class TestExitCodes:
    """Test cases for mapping failures to exit codes."""

    def test_estimation_failure_is_runtime_error(self, tmp_path, capsys):
        with patch("ringcore_sim.run_experiment", side_effect=EstimationError("no power")):
            code = main(["budget_check", "--seed", "2", "--out", str(tmp_path)])
        assert code == EXIT_RUNTIME
        err = capsys.readouterr().err
        assert "no power" in err
        assert "Configuration error" not in err

    def test_no_lock_is_runtime_error(self, tmp_path):
        with patch("ringcore_sim.run_experiment", side_effect=NoLockError("no lock")):
            code = main(["budget_check", "--seed", "2", "--out", str(tmp_path)])
        assert code == EXIT_RUNTIME

    def test_plain_value_error_propagates(self, tmp_path):
        with patch("ringcore_sim.run_experiment", side_effect=ValueError("array shapes")):
            with pytest.raises(ValueError, match="array shapes"):
                main(["budget_check", "--seed", "2", "--out", str(tmp_path)])

    def test_unknown_log_level_is_configuration_error(self, capsys):
        assert main(["--log-level", "chatty", "schema"]) == EXIT_CONFIG
        assert "Configuration error" in capsys.readouterr().err
