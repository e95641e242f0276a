import dataclasses
import json

import numpy as np
import pytest

from chondrosim import (
    ConfigError,
    Interval,
    Rectangle,
    build_initial_fields,
    builtin_scenario,
    builtin_scenarios,
    parse_config,
    steady_state,
)
from chondrosim.scenarios import scenario_to_config

# Every numeric literal the built-in catalogue is allowed to contain,
# audited field by field below.
BASE_PARAMS = dict(a1=0.015, a2=0.007, alpha=0.15, delta=0.6, beta=0.05, gamma1=0.1, gamma2=0.3, kc1=1.0, kc2=1.0)
BUMP = dict(amplitude=0.1, center_1d=[0.5], width=0.2)
COSINE = dict(amplitude=0.01, periods=2)
BLOB = dict(c1_amplitude=1e-6, c2_amplitude=1e-9, center_2d=[5.0, 5.0], width=0.2)
NOISE = dict(h_base=1.0, amplitude=1e-6, modulation_periods=2)
B_HIGH, B_LOW = 3.7, 1.8


class TestBuiltinCatalogue:
    def test_names(self):
        names = {s.name for s in builtin_scenarios()}
        assert names == {
            "scenario1-b3.7",
            "scenario1-b1.8",
            "scenario2-b3.7",
            "scenario2-b1.8",
            "scenario3-b3.7",
            "scenario4-b3.7",
            "scenario4-b1.8",
            "2d-gaussian",
            "2d-cosine",
        }

    def test_parameter_literals(self):
        for spec in builtin_scenarios():
            for key, value in BASE_PARAMS.items():
                assert getattr(spec.params, key) == value, (spec.name, key)
            assert spec.params.b in (B_HIGH, B_LOW)

    def test_scenario1_literals(self):
        for b in (B_HIGH, B_LOW):
            s = builtin_scenario(f"scenario1-b{b}")
            assert s.geometry == Interval(1.0)
            assert s.params.b == b
            pert = s.ic["c2"]["perturbation"]
            assert pert == {
                "type": "gaussian",
                "amplitude": BUMP["amplitude"],
                "center": BUMP["center_1d"],
                "width": BUMP["width"],
            }
            assert s.ic["c1"]["perturbation"]["type"] == "none"
            assert s.ic["h"]["perturbation"]["type"] == "none"

    def test_scenario2_and_3_move_the_bump(self):
        s2 = builtin_scenario("scenario2-b3.7")
        assert s2.ic["c1"]["perturbation"]["type"] == "gaussian"
        assert s2.ic["c2"]["perturbation"]["type"] == "none"
        s3 = builtin_scenario("scenario3-b3.7")
        assert s3.ic["h"]["perturbation"]["type"] == "gaussian"
        assert s3.ic["c1"]["perturbation"]["type"] == "none"
        # the attractant-bump study ships only with the supercritical b
        assert not any(s.name == "scenario3-b1.8" for s in builtin_scenarios())

    def test_scenario4_literals(self):
        for b in (B_HIGH, B_LOW):
            s = builtin_scenario(f"scenario4-b{b}")
            assert s.geometry == Interval(10.0)
            for fname in ("c1", "h"):
                pert = s.ic[fname]["perturbation"]
                assert pert == {"type": "cosine", "amplitude": COSINE["amplitude"], "periods": COSINE["periods"]}
            assert s.ic["c2"]["perturbation"]["type"] == "none"

    def test_2d_literals(self):
        g = builtin_scenario("2d-gaussian")
        assert g.geometry == Rectangle(10.0, 10.0)
        assert g.resolution == (101, 101)
        assert g.params.b == B_HIGH
        assert g.ic["c1"]["perturbation"] == {
            "type": "gaussian",
            "amplitude": BLOB["c1_amplitude"],
            "center": BLOB["center_2d"],
            "width": BLOB["width"],
        }
        assert g.ic["c2"]["perturbation"]["amplitude"] == BLOB["c2_amplitude"]
        assert g.ic["h"] == {
            "base": NOISE["h_base"],
            "perturbation": {"type": "noise", "amplitude": NOISE["amplitude"]},
        }
        assert g.seed is not None
        c = builtin_scenario("2d-cosine")
        assert c.ic["h"]["perturbation"] == {
            "type": "noise",
            "amplitude": NOISE["amplitude"],
            "modulation_periods": NOISE["modulation_periods"],
        }


class TestInitialConditions:
    def test_scenario1_bump_value_at_center(self):
        s = builtin_scenario("scenario1-b3.7")
        grid = s.make_grid()
        fields = build_initial_fields(s, grid)
        ss = steady_state(s.params)
        i_center = 200  # x = 0.5 on a 401-node unit grid
        assert grid.x[i_center] == 0.5
        assert fields.c2[i_center] == pytest.approx(ss.c2 + 0.1, rel=1e-14)
        assert np.allclose(fields.c1, ss.c1)
        assert np.allclose(fields.h, ss.h)
        # the bump is the stated exponential at every node
        expected = ss.c2 + 0.1 * np.exp(-((grid.x - 0.5) ** 2) / 0.2)
        assert np.allclose(fields.c2, expected, rtol=0, atol=0)

    def test_scenario4_cosine_on_c1_and_h_only(self):
        s = builtin_scenario("scenario4-b3.7")
        grid = s.make_grid()
        fields = build_initial_fields(s, grid)
        ss = steady_state(s.params)
        expected = 0.01 * np.cos(4 * np.pi * (grid.x - 5.0) / 10.0)
        assert np.allclose(fields.c1 - ss.c1, expected, atol=1e-15)
        assert np.allclose(fields.h - ss.h, expected, atol=1e-15)
        assert np.allclose(fields.c2, ss.c2)

    def test_2d_blob_and_noise(self):
        s = builtin_scenario("2d-gaussian")
        grid = s.make_grid()
        fields = build_initial_fields(s, grid)
        ss = steady_state(s.params)
        X, Y = grid.meshgrid()
        blob = np.exp(-((X - 5.0) ** 2 + (Y - 5.0) ** 2) / 0.2)
        assert np.allclose(fields.c1, ss.c1 + 1e-6 * blob, rtol=0, atol=0)
        assert np.allclose(fields.c2, ss.c2 + 1e-9 * blob, rtol=0, atol=0)
        assert np.all(fields.h >= 1.0)
        assert np.all(fields.h <= 1.0 + 1e-6)

    def test_seeded_noise_reproducible_bit_for_bit(self):
        s = builtin_scenario("2d-gaussian")
        f1 = build_initial_fields(s)
        f2 = build_initial_fields(s)
        assert np.array_equal(f1.h, f2.h)
        f3 = build_initial_fields(s.with_seed(s.seed + 1))
        assert not np.array_equal(f1.h, f3.h)

    def test_modulated_noise_carries_cosine_sign_structure(self):
        s = builtin_scenario("2d-cosine")
        grid = s.make_grid()
        fields = build_initial_fields(s, grid)
        X, _ = grid.meshgrid()
        mod = np.cos(4 * np.pi * (X - 5.0) / 10.0)
        dev = fields.h - 1.0
        # noise is nonnegative, so the deviation takes the modulation's sign
        assert np.all(dev * mod >= -1e-18)

    def test_noise_requires_seed(self):
        s = builtin_scenario("2d-gaussian")
        with pytest.raises(ConfigError):
            dataclasses.replace(s, seed=None)


class TestAllBuiltinsRun:
    @pytest.mark.parametrize("name", [s.name for s in builtin_scenarios()])
    def test_truncated_run_completes_cleanly(self, name):
        from chondrosim.runner import run_scenario

        spec = builtin_scenario(name)
        coarse = (41,) if len(spec.resolution) == 1 else (21, 21)
        spec = dataclasses.replace(spec, resolution=coarse, t_end=2.0, output_times=())
        summary = run_scenario(spec, out_dir=None, record_diagnostics=False)
        assert summary.result.t == pytest.approx(2.0)
        assert summary.result.violations == []


class TestParseConfig:
    def test_minimal_builtin_reference(self):
        spec = parse_config('{"scenario": "scenario1-b3.7"}')
        assert spec == builtin_scenario("scenario1-b3.7")

    def test_b_zero_override_accepted(self):
        spec = parse_config('{"scenario": "scenario1-b3.7", "b": 0}')
        assert spec.params.b == 0.0

    def test_negative_a1_rejected(self):
        with pytest.raises(ConfigError, match="a1"):
            parse_config('{"scenario": "scenario1-b3.7", "params": {"a1": -0.015}}')

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown top-level keys.*frobnicate"):
            parse_config('{"scenario": "scenario1-b3.7", "frobnicate": 1}')

    def test_unknown_scenario_name_rejected(self):
        with pytest.raises(ConfigError, match="unknown scenario"):
            parse_config('{"scenario": "scenario9-b9"}')

    def test_error_names_key_and_expected_type(self):
        with pytest.raises(ConfigError, match='key "time.t_end".*positive number'):
            parse_config('{"scenario": "scenario1-b3.7", "time": {"t_end": -3}}')
        with pytest.raises(ConfigError, match='key "seed": expected an integer'):
            parse_config('{"scenario": "scenario1-b3.7", "seed": "abc"}')
        with pytest.raises(ConfigError, match='key "geometry.length"'):
            parse_config('{"geometry": {"kind": "interval", "length": "one"}}')

    def test_standalone_config(self):
        doc = {
            "geometry": {"kind": "interval", "length": 2.0},
            "resolution": 51,
            "params": {"a1": 0.1, "a2": 0.1, "alpha": 0.2, "delta": 0.4, "beta": 0.1, "gamma1": 0.1, "gamma2": 0.2},
            "b": 1.0,
            "ic": {"c2": {"base": "steady", "perturbation": {"type": "eigenmode", "amplitude": 0.01, "index": 2}}},
            "time": {"t_end": 5.0, "dt": 0.01},
            "output": {"times": [0.0, 5.0]},
        }
        spec = parse_config(json.dumps(doc))
        assert spec.geometry == Interval(2.0)
        assert spec.resolution == (51,)
        assert spec.params.b == 1.0
        assert spec.dt_policy == 0.01
        assert spec.ic["c1"]["perturbation"]["type"] == "none"

    def test_missing_required_params_rejected(self):
        with pytest.raises(ConfigError, match="missing required entries"):
            parse_config(
                '{"geometry": {"kind": "interval", "length": 1}, '
                '"params": {"a1": 0.1}, "ic": {}, "time": {"t_end": 1}}'
            )

    def test_output_times_outside_horizon_rejected(self):
        with pytest.raises(ConfigError, match="output times"):
            parse_config('{"scenario": "scenario1-b3.7", "output": {"times": [0, 500]}, "time": {"t_end": 100}}')

    def test_roundtrip_through_canonical_config(self):
        for spec in builtin_scenarios():
            doc = scenario_to_config(spec)
            back = parse_config(json.dumps(doc))
            assert back.geometry == spec.geometry
            assert back.resolution == spec.resolution
            assert back.params == spec.params
            assert back.ic == spec.ic
            assert back.t_end == spec.t_end
            assert back.output_times == spec.output_times
            assert back.dt_policy == spec.dt_policy
            assert back.seed == spec.seed
            assert back.timeseries_stride == spec.timeseries_stride

    def test_ic_schema_violations_are_specific(self):
        base = '{"scenario": "scenario1-b3.7", "ic": {"c2": %s}}'
        with pytest.raises(ConfigError, match="ic.c2.perturbation.type"):
            parse_config(base % '{"perturbation": {"type": "wavelet"}}')
        with pytest.raises(ConfigError, match="missing keys.*width"):
            parse_config(base % '{"perturbation": {"type": "gaussian", "amplitude": 1, "center": [0.5]}}')
        with pytest.raises(ConfigError, match="unknown keys"):
            parse_config(base % '{"perturbation": {"type": "noise", "amplitude": 1, "sigma": 2}}')
