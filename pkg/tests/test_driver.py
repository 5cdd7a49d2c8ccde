import subprocess
import sys

import numpy as np
import pytest

from activeflux.cli import main, parse_config_file
from activeflux.driver import (
    RunConfig,
    convergence_study,
    format_convergence_table,
    run,
    si_study,
    write_csv,
    write_si_csv,
)
from activeflux.problems import PROBLEMS, registry_lookup


class TestRegistry:
    def test_paper_constants_pinned(self):
        assert registry_lookup("shock-entropy").k == 1.0
        assert registry_lookup("shock-entropy").c_ref == 0.01
        assert registry_lookup("shock-density").k == 6.0
        assert registry_lookup("shock-density").c_ref == 0.2
        assert registry_lookup("blast").k == 1.2
        assert registry_lookup("blast").c_ref == 200.0

    def test_alpha_defaults_to_momentum(self):
        for spec in PROBLEMS.values():
            assert spec.alpha == "momentum"

    def test_unknown_name_lists_valid(self):
        with pytest.raises(KeyError) as info:
            registry_lookup("kelvin-helmholtz")
        msg = str(info.value)
        for name in PROBLEMS:
            assert name in msg

    def test_initial_averages_are_exact_for_straddled_jumps(self):
        # sod diaphragm sits on a staggered center: its average mixes halves
        from activeflux.grid import OverlapGrid
        from activeflux.physics import GasModel

        spec = registry_lookup("sod")
        grid = OverlapGrid(10, 0.0, 1.0, "outflow")
        vbar = spec.staggered_averages(grid, GasModel(1.4))
        i = 5  # staggered center at x = 0.5
        assert np.allclose(vbar[i], [(1.0 + 0.125) / 2, 0.0, (1.0 + 0.1) / 2])


class TestRunDriver:
    def test_ordering_advance_si_postprocess(self):
        events = []
        spec = registry_lookup("smooth-wave")
        rec = run(spec, 16, RunConfig(t_end=0.05), observer=events.append)
        assert rec.steps >= 1
        assert events == ["advance", "si", "postprocess"] * rec.steps

    def test_periodic_conservation(self):
        rec = run(registry_lookup("smooth-wave"), 64, RunConfig(t_end=1.0))
        assert np.all(rec.conservation_drift < 1e-12)

    def test_determinism_identical_csv_bytes(self, tmp_path):
        spec = registry_lookup("sod")
        paths = []
        for tag in ("a", "b"):
            rec = run(spec, 64, RunConfig(t_end=0.05))
            path = tmp_path / f"{tag}.csv"
            write_csv(rec, path)
            paths.append(path.read_bytes())
        assert paths[0] == paths[1]

    def test_overrides_take_effect(self):
        spec = registry_lookup("sod")
        rec = run(spec, 32, RunConfig(t_end=0.01, k=5.0, alpha="density"))
        assert rec.k == 5.0
        assert np.isclose(rec.time, 0.01)

    def test_too_few_cells_rejected(self):
        with pytest.raises(ValueError):
            run(registry_lookup("sod"), 4)

    def test_solver_failure_carries_step_and_time(self):
        from activeflux.physics import InvalidStateError
        from activeflux.problems import ProblemSpec, const_piece

        vacuum = ProblemSpec(
            name="double-rarefaction",
            x_min=0.0,
            x_max=1.0,
            bc="outflow",
            gamma=1.4,
            t_end=0.5,
            pieces=(
                const_piece(0.0, 0.5, 1.0, -2.0, 0.01),
                const_piece(0.5, 1.0, 1.0, 2.0, 0.01),
            ),
        )
        with pytest.raises(InvalidStateError, match=r"failed at step \d+, t="):
            run(vacuum, 64, RunConfig(max_steps=100_000))


class TestCsv:
    def test_row_count_and_header(self, tmp_path):
        rec = run(registry_lookup("smooth-wave"), 16, RunConfig(t_end=0.05))
        path = tmp_path / "out.csv"
        write_csv(rec, path)
        lines = path.read_text().split("\n")
        assert lines[0] == "x,rho,u,p,E,eps,eps_hat,flag"
        assert len(lines) == 16 + 2  # header + rows + trailing newline
        assert lines[-1] == ""
        assert b"\r" not in path.read_bytes()

    def test_flag_serialized_as_01(self, tmp_path):
        rec = run(registry_lookup("sod"), 64, RunConfig(t_end=0.1))
        assert rec.flags.any() and not rec.flags.all()
        path = tmp_path / "out.csv"
        write_csv(rec, path)
        flags = [line.split(",")[7] for line in path.read_text().splitlines()[1:]]
        assert set(flags) == {"0", "1"}

    def test_roundtrip_bitwise(self, tmp_path):
        rec = run(registry_lookup("sod"), 32, RunConfig(t_end=0.05))
        path = tmp_path / "out.csv"
        write_csv(rec, path)
        data = np.genfromtxt(path, delimiter=",", names=True)
        assert np.array_equal(data["x"], rec.x)
        assert np.array_equal(data["rho"], rec.rho)
        assert np.array_equal(data["eps_hat"], rec.eps_hat)

    def test_si_csv_reference_columns(self, tmp_path):
        rec = run(registry_lookup("sod"), 32, RunConfig(t_end=0.05))
        path = tmp_path / "si.csv"
        write_si_csv(rec, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,rho,u,p,E,eps,eps_hat,flag,k_eps_ave,c_dx2"
        first = lines[1].split(",")
        assert float(first[8]) == rec.k * rec.eps_ave
        assert float(first[9]) == rec.c_ref * rec.dx**2

    def test_unwritable_path_raises(self):
        rec = run(registry_lookup("smooth-wave"), 16, RunConfig(t_end=0.02))
        with pytest.raises(OSError, match="no/such/dir"):
            write_csv(rec, "/no/such/dir/out.csv")


class TestConvergenceStudy:
    def test_degenerate_single_n(self):
        rows = convergence_study(registry_lookup("smooth-wave"), [64], RunConfig(t_end=0.2))
        assert len(rows) == 1
        assert rows[0].order is None
        table = format_convergence_table(rows)
        assert "64" in table

    def test_self_comparison_zero_error(self):
        spec = registry_lookup("smooth-wave")
        from activeflux.grid import OverlapGrid

        grid = OverlapGrid(64, spec.x_min, spec.x_max, spec.bc)
        exact = spec.exact_density_averages(grid, spec.t_end)
        assert np.abs(exact - spec.exact_density_averages(grid, spec.t_end)).max() == 0.0


class TestSiStudy:
    def test_emits_csvs_and_rates(self, tmp_path):
        spec = registry_lookup("smooth-wave")
        result = si_study(spec, [32, 64], RunConfig(t_end=0.2), out_dir=tmp_path)
        assert (tmp_path / "si_smooth-wave_n32.csv").exists()
        assert (tmp_path / "si_smooth-wave_n64.csv").exists()
        assert len(result.rates) == 1
        assert result.rates[0] is not None


class TestConfigFile:
    def test_parse_and_comments(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("problem = sod\nn = 32\n# comment\nt-end = 0.05  # inline\ncfl=0.2\n")
        values = parse_config_file(cfg)
        assert values == {"problem": "sod", "n": "32", "t_end": "0.05", "cfl": "0.2"}

    def test_malformed_line_rejected(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("problem sod\n")
        with pytest.raises(ValueError, match="bad.cfg:1"):
            parse_config_file(cfg)


class TestCli:
    def test_run_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "sod.csv"
        code = main(
            ["run", "--problem", "sod", "--n", "32", "--t-end", "0.05", "--out", str(out)]
        )
        assert code == 0
        assert out.exists()
        assert "sod" in capsys.readouterr().out

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        out = tmp_path / "o.csv"
        cfg.write_text(f"problem = sod\nn = 16\nt-end = 0.5\nout = {out}\n")
        # the flag overrides the file's t-end; 16 cells come from the file
        code = main(["run", "--config", str(cfg), "--t-end", "0.02"])
        assert code == 0
        text = out.read_text()
        assert len(text.splitlines()) == 17

    def test_convergence_table_printed(self, capsys):
        code = main(
            ["convergence", "--problem", "smooth-wave", "--n", "32,64", "--t-end", "0.2"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "L1 error" in out and "order" in out

    def test_si_study_command(self, tmp_path, capsys):
        code = main(
            [
                "si-study",
                "--problem",
                "smooth-wave",
                "--n",
                "32,64",
                "--t-end",
                "0.2",
                "--out",
                str(tmp_path / "si"),
            ]
        )
        assert code == 0
        assert (tmp_path / "si" / "si_smooth-wave_n32.csv").exists()

    def test_unknown_problem_exits_nonzero(self, capsys):
        code = main(["run", "--problem", "sod", "--n", "4"])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_module_entrypoint(self, tmp_path):
        out = tmp_path / "m.csv"
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "activeflux.cli",
                "run",
                "--problem",
                "smooth-wave",
                "--n",
                "16",
                "--t-end",
                "0.02",
                "--out",
                str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()
