import json

import numpy as np
import pytest

from chondrosim.cli import EXIT_DIVERGED, EXIT_OK, EXIT_USAGE, main

BASELINE_FLAGS = [
    "--a1", "0.015", "--a2", "0.007", "--alpha", "0.15", "--delta", "0.6",
    "--beta", "0.05", "--gamma1", "0.1", "--gamma2", "0.3",
]


def parse_kv(line: str) -> dict[str, str]:
    return dict(token.split("=", 1) for token in line.split())


class TestSteadyStateCommand:
    def test_baseline_values(self, capsys):
        assert main(["steady-state", *BASELINE_FLAGS]) == EXIT_OK
        out = parse_kv(capsys.readouterr().out.strip())
        assert float(out["c1*"]) == pytest.approx(0.8, rel=1e-12)
        assert float(out["c2*"]) == pytest.approx(0.2, rel=1e-12)
        assert float(out["h*"]) == pytest.approx(2.5, rel=1e-12)
        assert float(out["residual"]) <= 1e-12

    def test_symmetric_rates(self, capsys):
        flags = ["--alpha", "0.3", "--delta", "0.3", "--beta", "0.1", "--gamma1", "0.1", "--gamma2", "0.3"]
        assert main(["steady-state", *flags]) == EXIT_OK
        out = parse_kv(capsys.readouterr().out.strip())
        assert float(out["c1*"]) == pytest.approx(0.5)
        assert float(out["c2*"]) == pytest.approx(0.5)

    def test_missing_param_exits_2(self, capsys):
        assert main(["steady-state", "--alpha", "0.15"]) == EXIT_USAGE
        assert "missing required parameters" in capsys.readouterr().err

    def test_params_from_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scenario": "scenario1-b3.7"}))
        assert main(["steady-state", "--config", str(cfg)]) == EXIT_OK
        out = parse_kv(capsys.readouterr().out.strip())
        assert float(out["c1*"]) == pytest.approx(0.8)


class TestStabilityCommand:
    def test_baseline_interval(self, capsys):
        assert main(["stability", *BASELINE_FLAGS, "--geometry", "interval", "--length", "1"]) == EXIT_OK
        out = parse_kv(capsys.readouterr().out.strip().splitlines()[0])
        assert float(out["b_c"]) == pytest.approx(3.34, abs=0.05)
        assert out["j0"] == "1"
        assert float(out["k_j0"]) == pytest.approx(np.pi**2, rel=1e-10)
        assert out["degenerate"] == "false"
        assert float(out["omega0"]) > 0
        assert float(out["slope"]) > 0

    def test_table_row_count(self, capsys):
        from chondrosim import Interval, SpectrumSpec, critical_sensitivity, default_params

        report = critical_sensitivity(default_params(), SpectrumSpec(Interval(1.0)))
        assert main(["stability", *BASELINE_FLAGS, "--table"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) - 1 == len(report.table)
        first = parse_kv(lines[1])
        assert float(first["k"]) == pytest.approx(np.pi**2, rel=1e-10)

    def test_rectangle_geometry(self, capsys):
        args = ["stability", *BASELINE_FLAGS, "--geometry", "rectangle", "--lx", "10", "--ly", "10"]
        assert main(args) == EXIT_OK
        out = parse_kv(capsys.readouterr().out.strip().splitlines()[0])
        # dense square spectrum reaches closer to the continuous minimum
        assert float(out["b_c"]) <= 3.34

    def test_rectangle_requires_extents(self, capsys):
        assert main(["stability", *BASELINE_FLAGS, "--geometry", "rectangle"]) == EXIT_USAGE


class TestSimulateCommand:
    @pytest.fixture
    def tiny_config(self, tmp_path):
        doc = {
            "scenario": "scenario1-b3.7",
            "resolution": 51,
            "time": {"t_end": 1.0},
            "output": {"times": [0.0, 1.0], "timeseries_stride": 5},
        }
        path = tmp_path / "tiny.json"
        path.write_text(json.dumps(doc))
        return path

    def test_runs_and_writes_outputs(self, tiny_config, tmp_path, capsys):
        out_dir = tmp_path / "out"
        assert main(["simulate", "--config", str(tiny_config), "--out", str(out_dir)]) == EXIT_OK
        kv = parse_kv(capsys.readouterr().out.strip())
        assert kv["status"] == "completed"
        assert kv["violations"] == "0"
        assert (out_dir / "scenario1-b3.7_t0.csv").exists()
        assert (out_dir / "scenario1-b3.7_t1.csv").exists()
        assert (out_dir / "run_manifest.json").exists()

    def test_identical_bytes_across_invocations(self, tiny_config, tmp_path, capsys):
        main(["simulate", "--config", str(tiny_config), "--out", str(tmp_path / "r1")])
        main(["simulate", "--config", str(tiny_config), "--out", str(tmp_path / "r2")])
        capsys.readouterr()
        a = (tmp_path / "r1" / "scenario1-b3.7_t1.csv").read_bytes()
        b = (tmp_path / "r2" / "scenario1-b3.7_t1.csv").read_bytes()
        assert a == b

    def test_requires_exactly_one_source(self, capsys, tmp_path):
        assert main(["simulate", "--out", str(tmp_path)]) == EXIT_USAGE
        assert main(["simulate", "--scenario", "x", "--config", "y", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_unknown_scenario_exits_2(self, capsys, tmp_path):
        assert main(["simulate", "--scenario", "nope", "--out", str(tmp_path / "o")]) == EXIT_USAGE
        assert "unknown scenario" in capsys.readouterr().err

    def test_seed_precedence_flag_over_env_over_config(self, tmp_path, capsys, monkeypatch):
        doc = {
            "scenario": "2d-gaussian",
            "resolution": [11, 11],
            "time": {"t_end": 0.5},
            "output": {"times": [], "timeseries_stride": 10},
            "seed": 1,
        }
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(doc))

        def run_and_read_seed(args, env_seed=None):
            if env_seed is not None:
                monkeypatch.setenv("CHONDRO_SEED", str(env_seed))
            else:
                monkeypatch.delenv("CHONDRO_SEED", raising=False)
            out = tmp_path / f"o{np.random.randint(1 << 30)}"
            assert main(["simulate", "--config", str(cfg), "--out", str(out), *args]) == EXIT_OK
            capsys.readouterr()
            manifest = json.loads((out / "run_manifest.json").read_text())
            return manifest["config"]["seed"]

        assert run_and_read_seed([]) == 1
        assert run_and_read_seed([], env_seed=7) == 7
        assert run_and_read_seed(["--seed", "42"], env_seed=7) == 42


class TestDivergenceExit:
    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_blowup_exits_3_and_writes_manifest(self, tmp_path, capsys):
        # A fixed step six orders past the kinetic limit makes the explicit
        # exchange update oscillate with growing amplitude until overflow.
        doc = {
            "scenario": "scenario1-b3.7",
            "resolution": 51,
            "time": {"t_end": 1e8, "dt": 1e6},
            "output": {"times": [], "timeseries_stride": 1},
        }
        cfg = tmp_path / "blowup.json"
        cfg.write_text(json.dumps(doc))
        out = tmp_path / "out"
        code = main(["simulate", "--config", str(cfg), "--out", str(out)])
        assert code == EXIT_DIVERGED
        captured = capsys.readouterr()
        assert "status=diverged" in captured.out
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert manifest["status"].startswith("diverged")
        assert (out / "timeseries.csv").exists()


class TestVerifyCommand:
    def test_stability_suite_passes(self, capsys):
        assert main(["verify", "--suite", "stability"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "check=rh-root-oracle status=pass" in out
        assert "summary=pass" in out

    def test_failure_exits_1(self, capsys, monkeypatch):
        from chondrosim import cli
        from chondrosim.verify import CheckResult

        monkeypatch.setattr(cli, "run_suite", lambda name: [CheckResult("forced", False, "boom")])
        assert main(["verify", "--suite", "solver"]) == 1
        out = capsys.readouterr().out
        assert "check=forced status=fail" in out
        assert "summary=fail" in out


class TestStabilityDegenerate:
    def test_degenerate_prints_flag_and_exits_0(self, capsys):
        # Interval length tuned so the first two modes tie (see the
        # stability unit tests for the derivation).
        args = ["stability", *BASELINE_FLAGS, "--geometry", "interval", "--length", "1.4161386102284075"]
        assert main(args) == EXIT_OK
        out = parse_kv(capsys.readouterr().out.strip().splitlines()[0])
        assert out["degenerate"] == "true"
        assert "omega0" not in out


class TestScenariosCommand:
    def test_lists_all_builtins(self, capsys):
        from chondrosim import builtin_scenarios

        assert main(["scenarios"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == len(builtin_scenarios())
        names = {parse_kv(line.split(' description')[0])["scenario"] for line in lines}
        assert "2d-cosine" in names and "scenario1-b3.7" in names


class TestUsageErrors:
    def test_no_subcommand_exits_2(self, capsys):
        assert main([]) == EXIT_USAGE

    def test_unknown_subcommand_exits_2(self, capsys):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_missing_config_file_exits_2(self, capsys, tmp_path):
        assert main(["steady-state", "--config", str(tmp_path / "none.json")]) == EXIT_USAGE
