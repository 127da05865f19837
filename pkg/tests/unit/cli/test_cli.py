import json
from pathlib import Path
from unittest.mock import patch

import pytest

from ilr_approx.cli import EXIT_BAD_REFERENCE, EXIT_IO, EXIT_OK, EXIT_PARTIAL, cmd_simulate, main


def write_config(tmp_path, **overrides):
    data = {
        "master_seed": 5,
        "n_draws": 2000,
        "output_dir": str(tmp_path / "out"),
        "grid": {"dgd": ["a", "b"], "alpha_s": [101], "total": [101]},
    }
    data.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path


@pytest.fixture(autouse=True)
def keep_signal_handlers():
    with patch("ilr_approx.cli.signal.signal"), patch("ilr_approx.cli.atexit.register"):
        with patch("ilr_approx.cli._cleanup_registered", False):
            yield


class TestTable3Command:

    def test_reference_grid(self, tmp_path, capsys):
        assert main(["table3", "--out", str(tmp_path)]) == EXIT_OK
        lines = (tmp_path / "table3.csv").read_text().splitlines()
        assert len(lines) == 91
        assert "Dir-Mn,101.0,,100000,981.38" in lines
        assert "9804.91" in capsys.readouterr().out

    def test_from_config(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["table3", "--config", str(config)]) == EXIT_OK
        lines = (tmp_path / "out" / "table3.csv").read_text().splitlines()
        assert lines[1:] == ["Mn,,,101,1.00", "Dir-Mn,101.0,,101,1.98"]

    def test_unwritable_output(self, tmp_path):
        with patch("ilr_approx.cli.write_csv", side_effect=PermissionError("read-only")):
            assert main(["table3", "--out", str(tmp_path)]) == EXIT_IO

    def test_bad_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n_draws": 1}))
        assert main(["table3", "--config", str(path)]) == EXIT_IO

    def test_missing_config(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "nope.json")]) == EXIT_IO


class TestSimulateCommand:

    def test_writes_outputs(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["simulate", "--config", str(config)]) == EXIT_OK
        out = tmp_path / "out"
        assert (out / "comparisons.csv").exists()
        assert sorted(p.name for p in (out / "summaries").iterdir()) == ["a_K101.csv", "b_as101_K101.csv"]
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["master_seed"] == 5

    def test_rerun_is_byte_identical(self, tmp_path):
        config = write_config(tmp_path)
        first_out, second_out = tmp_path / "first", tmp_path / "second"
        assert main(["simulate", "--config", str(config), "--out", str(first_out)]) == EXIT_OK
        assert main(["simulate", "--config", str(config), "--out", str(second_out), "--parallel", "2"]) == EXIT_OK
        for name in ("comparisons.csv", "summaries/a_K101.csv", "summaries/b_as101_K101.csv"):
            assert (first_out / name).read_bytes() == (second_out / name).read_bytes()

    def test_seed_override_changes_results(self, tmp_path):
        config = write_config(tmp_path)
        main(["simulate", "--config", str(config), "--out", str(tmp_path / "s5")])
        main(["simulate", "--config", str(config), "--out", str(tmp_path / "s6"), "--seed", "6"])
        first = (tmp_path / "s5" / "comparisons.csv").read_bytes()
        second = (tmp_path / "s6" / "comparisons.csv").read_bytes()
        assert first != second

    def test_partial_failure(self, tmp_path):
        config = write_config(tmp_path)
        with patch("ilr_approx.harness.grid.run_scenario", side_effect=RuntimeError("boom")):
            assert main(["simulate", "--config", str(config)]) == EXIT_PARTIAL
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert set(manifest["failures"]) == {"a_K101", "b_as101_K101"}

    def test_emit_svg(self, tmp_path):
        config = write_config(tmp_path, emit_svg=True)
        assert main(["simulate", "--config", str(config)]) == EXIT_OK
        assert (tmp_path / "out" / "figures" / "log_ratio_mean_fixed.svg").exists()


class TestQqCommand:

    def test_writes_series(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["qq", "--config", str(config), "--scenario", "b_as101_K101", "--coord", "4"]) == EXIT_OK
        lines = (tmp_path / "out" / "qq" / "b_as101_K101_coord4.csv").read_text().splitlines()
        assert lines[0] == "theoretical,sample"
        assert len(lines) == 2001

    def test_proportion_series(self, tmp_path):
        config = write_config(tmp_path)
        args = ["qq", "--config", str(config), "--scenario", "a_K101", "--coord", "5", "--proportion"]
        assert main(args) == EXIT_OK
        assert (tmp_path / "out" / "qq" / "a_K101_part5.csv").exists()

    def test_unknown_label(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["qq", "--config", str(config), "--scenario", "z_K1", "--coord", "1"]) == EXIT_BAD_REFERENCE

    @pytest.mark.parametrize("coord", ["0", "5"])
    def test_coordinate_out_of_range(self, tmp_path, coord):
        config = write_config(tmp_path)
        args = ["qq", "--config", str(config), "--scenario", "a_K101", "--coord", coord]
        assert main(args) == EXIT_BAD_REFERENCE


class TestFiguresCommand:

    def test_empty_grid(self, tmp_path):
        config = write_config(tmp_path, grid={"dgd": []})
        assert main(["figures", "--config", str(config)]) == EXIT_OK
        assert not (tmp_path / "out").exists()

    def test_renders_from_fresh_simulation(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["figures", "--config", str(config)]) == EXIT_OK
        figures = sorted(p.name for p in (tmp_path / "out" / "figures").iterdir())
        assert "composition_b_as101_K101.svg" in figures
        assert "log_ratio_eig_fixed.svg" in figures
        assert (tmp_path / "out" / "comparisons.csv").exists()
        assert Path(tmp_path / "out" / "compositions" / "a_K101.csv").exists()

    def test_reuses_comparisons_of_same_config(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["simulate", "--config", str(config)]) == EXIT_OK
        with patch("ilr_approx.cli.cmd_simulate") as simulate:
            assert main(["figures", "--config", str(config)]) == EXIT_OK
        simulate.assert_not_called()
        assert (tmp_path / "out" / "figures" / "log_ratio_mean_fixed.svg").exists()

    def test_resimulates_when_seed_differs(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["simulate", "--config", str(config), "--seed", "6"]) == EXIT_OK
        stale = (tmp_path / "out" / "comparisons.csv").read_bytes()
        with patch("ilr_approx.cli.cmd_simulate", wraps=cmd_simulate) as simulate:
            assert main(["figures", "--config", str(config)]) == EXIT_OK
        simulate.assert_called_once()
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["master_seed"] == 5
        assert (tmp_path / "out" / "comparisons.csv").read_bytes() != stale

    def test_resimulates_without_manifest(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["simulate", "--config", str(config)]) == EXIT_OK
        (tmp_path / "out" / "manifest.json").unlink()
        with patch("ilr_approx.cli.cmd_simulate", wraps=cmd_simulate) as simulate:
            assert main(["figures", "--config", str(config)]) == EXIT_OK
        simulate.assert_called_once()
        assert (tmp_path / "out" / "manifest.json").exists()


class TestCleanupRegistration:

    def test_handlers_installed_once(self, tmp_path):
        with patch("ilr_approx.cli.atexit.register") as register, patch("ilr_approx.cli.signal.signal") as install:
            assert main(["table3", "--out", str(tmp_path)]) == EXIT_OK
            assert main(["table3", "--out", str(tmp_path)]) == EXIT_OK
        register.assert_called_once()
        assert install.call_count == 2
