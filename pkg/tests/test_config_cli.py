import numpy as np
import pytest

from chns1d import cli
from chns1d.config import ConfigError, parse_config_text


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class _SerialExecutor:
    """In-process stand-in for ProcessPoolExecutor in monkeypatched tests."""

    def __init__(self, max_workers=None):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def map(self, fn, jobs):
        return [fn(job) for job in jobs]


def csv_column(path, name):
    header, rows = read_csv(path)
    idx = header.index(name)
    return np.array([float(r[idx]) for r in rows])


class TestConfigParsing:
    def test_empty_config_is_valid(self):
        cfg = parse_config_text("")
        assert cfg.spec.grid.n_cells == 256
        assert cfg.controls.sigma_schedule == (0.25, 0.5, 0.75, 1.0)

    def test_comments_and_spacing(self):
        cfg = parse_config_text(
            "# full-line comment\n"
            "potential.theta0 = 0.8  # trailing comment\n"
            "\n"
            "potential.thetac=1.2\n"
        )
        assert cfg.spec.potential.theta0 == 0.8
        assert cfg.spec.potential.thetac == 1.2

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="potential.theta9"):
            parse_config_text("potential.theta9 = 1.0")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("problem.m1 = 1.0\nproblem.m1 = 2.0")

    def test_equal_temperatures_rejected(self):
        with pytest.raises(ConfigError, match="potential.theta0"):
            parse_config_text("potential.theta0 = 1.5\npotential.thetac = 1.5")

    def test_nonpositive_lambda1_rejected(self):
        with pytest.raises(ConfigError, match="fluid.lambda1"):
            parse_config_text("fluid.lambda1 = 0.0")

    def test_m2_equal_m1_rejected(self):
        with pytest.raises(ConfigError, match="problem.m2"):
            parse_config_text("problem.m1 = 1.0\nproblem.m2 = 1.0")

    def test_bad_float(self):
        with pytest.raises(ConfigError, match="problem.eps"):
            parse_config_text("problem.eps = lots")

    def test_forcing_kinds(self):
        cfg = parse_config_text(
            "forcing.g1.kind = sin\nforcing.g1.amplitude = 0.1\nforcing.g2.kind = bump\n"
            "forcing.g2.amplitude = 0.05\n"
        )
        assert np.max(np.abs(cfg.spec.g1.values)) > 0.0
        assert np.max(cfg.spec.g2.values) == pytest.approx(0.05, rel=1e-3)

    def test_bad_forcing_kind(self):
        with pytest.raises(ConfigError, match="forcing.g1.kind"):
            parse_config_text("forcing.g1.kind = noise")


SOLVE_CONFIG = """
domain.n_cells = 96
forcing.g1.kind = sin
forcing.g1.amplitude = 0.1
forcing.g2.kind = cos
forcing.g2.amplitude = 0.05
solver.eps_schedule = 1e-1,1e-2
"""


class TestCliPotential:
    def test_outputs_and_determinism(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("")
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(["potential", "--config", str(cfg), "--out", str(out1)]) == 0
        assert cli.main(["potential", "--config", str(cfg), "--out", str(out2)]) == 0
        assert (out1 / "potential.csv").read_bytes() == (out2 / "potential.csv").read_bytes()
        assert (out1 / "constants.txt").read_bytes() == (out2 / "constants.txt").read_bytes()

    def test_curvature_column_zero_in_tail(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("")
        out = tmp_path / "out"
        assert cli.main(["potential", "--config", str(cfg), "--out", str(out)]) == 0
        c = csv_column(out / "potential.csv", "c")
        col = csv_column(out / "potential.csv", "f2d_pp_minus")
        assert np.all(col[np.abs(c) > 1.1] == 0.0)

    def test_invalid_config_exits_2(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("potential.theta0 = 2.0\npotential.thetac = 1.0\n")
        assert cli.main(["potential", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


class TestCliSolve:
    def test_zero_forcing_fields_constant(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("domain.n_cells = 64\nsolver.eps_schedule = 1e-2\n")
        out = tmp_path / "out"
        assert cli.main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
        rho = csv_column(out / "fields.csv", "rho")
        u = csv_column(out / "fields.csv", "u")
        c = csv_column(out / "fields.csv", "c")
        assert np.max(np.abs(rho - 1.0)) <= 1e-8
        assert np.max(np.abs(u)) <= 1e-8
        assert np.max(np.abs(c - 0.3)) <= 1e-8
        report = (out / "report.txt").read_text()
        assert "ei_slack" in report and "mass1" in report
        header, rows = read_csv(out / "convergence.csv")
        assert header == ["stage", "iteration", "residual"]
        assert len(rows) >= 4

    def test_forced_solve_report(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(SOLVE_CONFIG)
        out = tmp_path / "out"
        assert cli.main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
        report = dict(
            line.split(" = ") for line in (out / "report.txt").read_text().splitlines()
        )
        h = 1.0 / 96
        assert float(report["ei_slack"]) >= -5.0 * h * h
        assert abs(float(report["mass1"]) - 1.0) <= 1e-12

    def test_divergence_reports_stage_and_exits_nonzero(self, tmp_path, monkeypatch, capsys):
        from chns1d import solver

        def blow_up(spec, controls, initial_state=None):
            raise solver.DivergenceError("residual diverged at stage sigma=1, eps=0.1")

        monkeypatch.setattr(solver, "continuation_solve", blow_up)
        cfg = tmp_path / "run.cfg"
        cfg.write_text("")
        rc = cli.main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 1
        err = capsys.readouterr().err
        assert "sigma=" in err and "eps=" in err


class TestCliSweep:
    def test_empty_values_usage_error(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("")
        rc = cli.main(
            ["sweep", "--config", str(cfg), "--out", str(tmp_path / "o"),
             "--sweep-key", "delta", "--values", ""]
        )
        assert rc == 2

    def test_wrong_direction_usage_error(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("")
        rc = cli.main(
            ["sweep", "--config", str(cfg), "--out", str(tmp_path / "o"),
             "--sweep-key", "delta", "--values", "0.05,0.1"]
        )
        assert rc == 2

    def test_delta_sweep_outputs(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(SOLVE_CONFIG)
        out = tmp_path / "out"
        rc = cli.main(
            ["sweep", "--config", str(cfg), "--out", str(out),
             "--sweep-key", "delta", "--values", "0.2,0.1"]
        )
        assert rc == 0
        header, rows = read_csv(out / "sweep.csv")
        assert header[:2] == ["delta", "status"]
        assert [r[1] for r in rows] == ["ok", "ok"]
        art = csv_column(out / "sweep.csv", "art_pressure_norm")
        assert art[0] > art[1]
        assert (out / "fields_delta_0.2.csv").exists()
        assert (out / "fields_delta_0.1.csv").exists()

    def test_parallel_sweep_matches_columns(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(SOLVE_CONFIG + "sweep.max_parallel = 2\n")
        out = tmp_path / "out"
        rc = cli.main(
            ["sweep", "--config", str(cfg), "--out", str(out),
             "--sweep-key", "eps", "--values", "1e-1,1e-2"]
        )
        assert rc == 0
        header, rows = read_csv(out / "sweep.csv")
        assert [r[1] for r in rows] == ["ok", "ok"]
        res = csv_column(out / "sweep.csv", "continuity_residual")
        assert res[0] > res[1] > 0.0

    def test_parallel_sweep_byte_deterministic(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(SOLVE_CONFIG + "sweep.max_parallel = 2\n")
        outs = (tmp_path / "a", tmp_path / "b")
        for out in outs:
            rc = cli.main(
                ["sweep", "--config", str(cfg), "--out", str(out),
                 "--sweep-key", "delta", "--values", "0.2,0.1"]
            )
            assert rc == 0
        assert (outs[0] / "sweep.csv").read_bytes() == (outs[1] / "sweep.csv").read_bytes()

    def test_sweep_failure_flagged_in_status_column(self, tmp_path, monkeypatch):
        from chns1d import solver

        def blow_up(args):
            return "failed(DivergenceError)", None, None

        monkeypatch.setattr(cli, "_sweep_value_cold", blow_up)
        cfg = tmp_path / "run.cfg"
        cfg.write_text("sweep.max_parallel = 2\ndomain.n_cells = 64\n")
        out = tmp_path / "out"
        # max_parallel capped at len(values); a single value runs in-process
        monkeypatch.setattr(cli, "ProcessPoolExecutor", _SerialExecutor)
        rc = cli.main(
            ["sweep", "--config", str(cfg), "--out", str(out),
             "--sweep-key", "delta", "--values", "0.2,0.1"]
        )
        assert rc == 1
        header, rows = read_csv(out / "sweep.csv")
        assert [r[1] for r in rows] == ["failed(DivergenceError)"] * 2
        assert rows[0][2] == "nan"


class TestCliCheck:
    def test_default_config_passes(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("domain.n_cells = 64\nsolver.eps_schedule = 1e-1,1e-2\n")
        rc = cli.main(["check", "--config", str(cfg)])
        captured = capsys.readouterr().out
        assert rc == 0
        assert "FAIL" not in captured
        assert "checks passed" in captured
