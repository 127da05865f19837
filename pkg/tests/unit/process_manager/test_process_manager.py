from unittest.mock import MagicMock, patch

import psutil
import pytest

from ilr_approx.process_manager import ProcessManager


@pytest.fixture
def manager():
    ProcessManager._instance = None
    yield ProcessManager.get_instance()
    ProcessManager._instance = None


def child(pid):
    proc = MagicMock()
    proc.pid = pid
    return proc


class TestProcessManager:

    def test_singleton(self, manager):
        assert ProcessManager.get_instance() is manager

    @patch("ilr_approx.process_manager.psutil.Process")
    def test_track_workers(self, mock_process, manager):
        mock_process.return_value.children.return_value = [child(101), child(102)]
        assert manager.track_workers() == [101, 102]
        mock_process.return_value.children.return_value = [child(101), child(103)]
        assert manager.track_workers() == [103]
        assert manager.get_all_pids() == [101, 102, 103]

    @patch("ilr_approx.process_manager.psutil.Process", side_effect=psutil.AccessDenied())
    def test_track_workers_tolerates_psutil_errors(self, mock_process, manager):
        assert manager.track_workers() == []

    @patch("ilr_approx.process_manager.psutil.wait_procs")
    @patch("ilr_approx.process_manager.psutil.Process")
    def test_terminate_then_kill(self, mock_process, mock_wait, manager):
        survivor = MagicMock()
        mock_process.return_value = survivor
        mock_wait.return_value = ([], [survivor])
        manager.tracked_pids.update({201})
        manager.terminate_all_processes(timeout=0.1)
        survivor.terminate.assert_called_once()
        survivor.kill.assert_called_once()
        assert manager.get_all_pids() == []

    @patch("ilr_approx.process_manager.psutil.wait_procs", return_value=([], []))
    @patch("ilr_approx.process_manager.psutil.Process", side_effect=psutil.NoSuchProcess(301))
    def test_already_exited_workers(self, mock_process, mock_wait, manager):
        manager.tracked_pids.update({301})
        manager.terminate_all_processes()
        assert manager.get_all_pids() == []

    def test_cleanup_skipped_outside_parent(self, manager):
        manager.tracked_pids.update({401})
        with patch("ilr_approx.process_manager.os.getpid", return_value=manager.parent_pid + 1):
            with patch.object(manager, "terminate_all_processes") as terminate:
                manager.cleanup()
        terminate.assert_not_called()

    def test_cleanup_in_parent(self, manager):
        manager.tracked_pids.update({501})
        with patch.object(manager, "terminate_all_processes") as terminate:
            manager.cleanup()
        terminate.assert_called_once()

    def test_clear_pids(self, manager):
        manager.tracked_pids.update({1, 2})
        manager.clear_pids()
        assert manager.get_all_pids() == []
