"""Tests for the key-value config grammar and typed assembly."""

import math

import pytest

from cylvort.config import load_run_config, parse_kv_text, run_config_from_kv
from cylvort.errors import ConfigError

MINIMAL = """
scenario.kind = random_cloud
sim.dt = 0.01
sim.t_end = 1.0
"""


class TestGrammar:
    def test_comments_and_blanks(self):
        text = """
        # leading comment
        scenario.kind = disc_patch   # trailing comment

        sim.dt = 0.5
        """
        kv = parse_kv_text(text)
        assert kv == {"scenario.kind": "disc_patch", "sim.dt": 0.5}

    def test_typed_values(self):
        kv = parse_kv_text(
            "scenario.blob_count = 250\n"
            "scenario.nonneg = TRUE\n"
            "sim.tail_exponents = 0, 1, 2\n"
            "output.csv = runs/out.csv\n"
        )
        assert kv["scenario.blob_count"] == 250
        assert kv["scenario.nonneg"] is True
        assert kv["sim.tail_exponents"] == (0, 1, 2)
        assert kv["output.csv"] == "runs/out.csv"

    def test_unknown_key_names_line(self):
        with pytest.raises(ConfigError, match="line 2.*scnario.kind"):
            parse_kv_text("\nscnario.kind = disc_patch\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="line 1.*key = value"):
            parse_kv_text("scenario.kind disc_patch\n")

    def test_bad_value_names_key(self):
        with pytest.raises(ConfigError, match="sim.dt.*'fast'"):
            parse_kv_text("sim.dt = fast\n")

    def test_bad_bool(self):
        with pytest.raises(ConfigError, match="scenario.nonneg"):
            parse_kv_text("scenario.nonneg = 1\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_kv_text("sim.dt = 0.1\nsim.dt = 0.2\n")

    def test_nan_rejected(self):
        with pytest.raises(ConfigError, match="nan"):
            parse_kv_text("sim.dt = nan\n")


class TestAssembly:
    def test_minimal(self):
        cfg = run_config_from_kv(parse_kv_text(MINIMAL))
        assert cfg.scenario.kind == "random_cloud"
        assert cfg.sim.dt == 0.01
        assert cfg.sim.t_end == 1.0
        assert cfg.sim.tail_exponents == (0, 1, 2, 3, 4, 5, 6)
        assert cfg.csv_path is None

    def test_seed_feeds_scenario_and_sim(self):
        cfg = run_config_from_kv(parse_kv_text(MINIMAL + "seed = 99\n"))
        assert cfg.scenario.seed == 99
        assert cfg.sim.seed == 99

    def test_missing_required_key(self):
        with pytest.raises(ConfigError, match="sim.t_end"):
            run_config_from_kv(parse_kv_text(
                "scenario.kind = random_cloud\nsim.dt = 0.1\n"
            ))

    def test_scenario_fields_forwarded(self):
        text = MINIMAL + (
            "scenario.blob_count = 12\n"
            "scenario.delta = 0.2\n"
            "scenario.center_x = 0.1\n"
            "scenario.center_y = 3.0\n"
        )
        cfg = run_config_from_kv(parse_kv_text(text))
        assert cfg.scenario.blob_count == 12
        assert cfg.scenario.delta == 0.2
        assert cfg.scenario.center == (0.1, 3.0)

    def test_center_default_y_is_pi(self):
        cfg = run_config_from_kv(parse_kv_text(MINIMAL + "scenario.center_x = 0.5\n"))
        assert cfg.scenario.center == (0.5, math.pi)

    def test_probe_keys(self):
        cfg = run_config_from_kv(parse_kv_text(
            MINIMAL + "probe.x_min = -4\nprobe.x_max = 4\nprobe.num_y = 32\n"
        ))
        assert cfg.sim.sup_u1_probe.x_min == -4.0
        assert cfg.sim.sup_u1_probe.num_y == 32

    def test_bad_integrator(self):
        with pytest.raises(ConfigError, match="integrator"):
            run_config_from_kv(parse_kv_text(MINIMAL + "sim.integrator = euler\n"))

    def test_semantic_violation_is_config_error(self):
        with pytest.raises(ConfigError, match="dt"):
            run_config_from_kv(parse_kv_text(
                "scenario.kind = random_cloud\nsim.dt = -1\nsim.t_end = 1\n"
            ))

    def test_scenario_violation_propagates(self):
        with pytest.raises(ConfigError, match="delta"):
            run_config_from_kv(parse_kv_text(
                "scenario.kind = disc_patch\nscenario.delta = 0\n"
                "sim.dt = 0.1\nsim.t_end = 1\n"
            ))


class TestLoadFile:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text(MINIMAL + "output.csv = out.csv\n")
        cfg = load_run_config(p)
        assert cfg.csv_path == "out.csv"
        assert cfg.raw["scenario.kind"] == "random_cloud"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_run_config(tmp_path / "absent.cfg")

    def test_error_prefixed_with_path(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("bogus.key = 1\n")
        with pytest.raises(ConfigError, match="bad.cfg.*line 1"):
            load_run_config(p)
