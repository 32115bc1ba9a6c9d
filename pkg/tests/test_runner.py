"""Tests for the channel job runner."""

from unittest.mock import Mock, patch

import pytest

from ringcore_sim.constants import RunState
from ringcore_sim.runner import ChannelJob, ChannelJobRunner, resolve_workers


def square(value: int) -> int:
    return value * value


def explode(value: int) -> int:
    raise RuntimeError(f"bad value {value}")


class TestResolveWorkers:
    """Test cases for worker count resolution."""

    def test_explicit_count(self):
        assert resolve_workers(3) == 3

    def test_zero_uses_physical_cores(self):
        with patch("ringcore_sim.runner.psutil.cpu_count", return_value=6):
            assert resolve_workers(0) == 6

    def test_zero_falls_back_to_one(self):
        with patch("ringcore_sim.runner.psutil.cpu_count", return_value=None):
            assert resolve_workers(0) == 1


class TestChannelJobRunner:
    """Test cases for ChannelJobRunner."""

    def test_init(self):
        runner = ChannelJobRunner()
        assert runner.workers == 1
        assert runner.state == RunState.PENDING
        assert runner.state_callbacks == []

    def test_serial_run_keeps_order(self):
        runner = ChannelJobRunner()
        jobs = [ChannelJob(key=i, func=square, kwargs={"value": i}) for i in range(5)]
        outcomes = runner.run(jobs)
        assert [o.result for o in outcomes] == [0, 1, 4, 9, 16]
        assert [o.key for o in outcomes] == list(range(5))
        assert runner.state == RunState.DONE

    def test_failed_job_does_not_abort(self):
        runner = ChannelJobRunner()
        jobs = [
            ChannelJob("a", square, {"value": 2}),
            ChannelJob("b", explode, {"value": 3}),
            ChannelJob("c", square, {"value": 4}),
        ]
        outcomes = runner.run(jobs)
        assert [o.ok for o in outcomes] == [True, False, True]
        assert "RuntimeError: bad value 3" in outcomes[1].error
        status = runner.get_status()
        assert status["completed"] == 3
        assert status["failed"] == 1
        assert status["state"] == RunState.DONE

    def test_state_callbacks(self):
        runner = ChannelJobRunner()
        callback = Mock()
        runner.add_state_callback(callback)
        runner.run([ChannelJob(0, square, {"value": 1})])
        assert [c.args[0] for c in callback.call_args_list] == [
            RunState.RUNNING,
            RunState.DONE,
        ]

    def test_remove_state_callback(self):
        runner = ChannelJobRunner()
        callback = Mock()
        runner.add_state_callback(callback)
        runner.remove_state_callback(callback)
        runner.remove_state_callback(callback)
        runner.run([])
        callback.assert_not_called()

    def test_failing_callback_is_ignored(self):
        runner = ChannelJobRunner()
        runner.add_state_callback(Mock(side_effect=Exception("callback")))
        runner.run([ChannelJob(0, square, {"value": 1})])
        assert runner.state == RunState.DONE

    def test_interrupt_marks_run_failed(self):
        runner = ChannelJobRunner()

        def interrupt() -> None:
            raise KeyboardInterrupt

        with pytest.raises(KeyboardInterrupt):
            runner.run([ChannelJob(0, interrupt)])
        assert runner.state == RunState.FAILED

    @pytest.mark.slow
    def test_process_pool_matches_serial(self):
        jobs = [ChannelJob(i, square, {"value": i}) for i in range(6)]
        pooled = ChannelJobRunner(parallel=2).run(jobs)
        serial = ChannelJobRunner().run(jobs)
        assert [o.result for o in pooled] == [o.result for o in serial]

    def test_get_status(self):
        status = ChannelJobRunner(parallel=2).get_status()
        assert status["workers"] == 2
        assert status["total"] == 0
        assert status["state"] == RunState.PENDING
