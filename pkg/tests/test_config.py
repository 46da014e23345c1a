"""Configuration parsing, defaults, override handling, and echo."""

import pytest

from senseplan.config import (
    apply_overrides,
    echo_config,
    load_config,
    parse_config_text,
    render_config_ini,
)
from senseplan.errors import ConfigError

MINIMAL = """
[field]
kind = gp-sample

[roi]
kind = rectangle
rect = 0, 0, 10, 10
"""

FULL = """
[scenario]
horizon = 12
trials = 3
noise_sd = 0.25
planner = greedy-edg
seed = 99

[kernel]
signal_variance = 2.0
lengthscale = 1.25
jitter = 1e-9

[mean]
constant = 4.5

[field]
kind = analytic
name = gauss-bumps
offset = 2.0
bumps = 3.0,2.0,2.0,1.0; -1.5,7.0,6.0,2.0

[roi]
kind = polygon
polygon = 0,0; 10,0; 10,10; 0,10

[placement]
kind = explicit
targets = 1,1; 2,2; 3,3
candidates = 1,1; 5,5
"""


class TestDefaults:
    def test_minimal_config_fills_defaults(self):
        cfg = parse_config_text(MINIMAL)
        assert cfg.horizon == 10
        assert cfg.trials == 20
        assert cfg.noise_sd == 1.0
        assert cfg.planner == "both"
        assert cfg.seed == 0
        assert cfg.signal_variance == 1.0
        assert cfg.mean_constant is None  # auto
        assert (cfg.n_targets, cfg.n_candidates, cfg.n_shared) == (61, 60, 5)

    def test_full_config_parsed(self):
        cfg = parse_config_text(FULL)
        assert cfg.horizon == 12
        assert cfg.planner == "greedy-edg"
        assert cfg.mean_constant == 4.5
        assert cfg.analytic_name == "gauss-bumps"
        params = dict(cfg.analytic_params)
        assert params["offset"] == 2.0
        assert params["bumps"] == ((3.0, 2.0, 2.0, 1.0), (-1.5, 7.0, 6.0, 2.0))
        assert cfg.explicit_targets == ((1.0, 1.0), (2.0, 2.0), (3.0, 3.0))
        assert cfg.n_shared == 1  # (1,1) appears in both lists


class TestValidationGathersEverything:
    def test_all_issues_reported_at_once(self):
        bad = """
[scenario]
horizon = 0
noise_sd = -2
planner = oracle

[kernel]
lengthscale = -1

[field]
kind = teleport
"""
        with pytest.raises(ConfigError) as err:
            parse_config_text(bad)
        msg = str(err.value)
        for token in (
            "scenario.horizon",
            "scenario.noise_sd",
            "scenario.planner",
            "kernel.lengthscale",
            "field.kind",
        ):
            assert token in msg
        assert "5 configuration problem(s)" in msg

    def test_unknown_keys_and_sections_flagged(self):
        bad = MINIMAL + "\n[extras]\nfoo = 1\n"
        with pytest.raises(ConfigError, match=r"unknown section \[extras\]"):
            parse_config_text(bad)
        bad2 = MINIMAL + "\n[kernel]\nbandwidth = 2\n"
        with pytest.raises(ConfigError, match="kernel.bandwidth"):
            parse_config_text(bad2)

    def test_missing_roi_for_synthetic_field(self):
        with pytest.raises(ConfigError, match="roi.kind"):
            parse_config_text("[field]\nkind = gp-sample\n")

    def test_grid_field_requires_csv_path(self):
        with pytest.raises(ConfigError, match="grid_csv"):
            parse_config_text("[field]\nkind = grid\n")


class TestOverrides:
    def test_cli_style_overrides(self):
        cfg = parse_config_text(MINIMAL)
        out = apply_overrides(
            cfg, {"seed": 5, "trials": 2, "horizon": 7, "planner": "random"}
        )
        assert (out.seed, out.trials, out.horizon, out.planner) == (5, 2, 7, "random")
        # untouched fields survive
        assert out.field_kind == cfg.field_kind

    def test_none_values_are_ignored(self):
        cfg = parse_config_text(MINIMAL)
        out = apply_overrides(cfg, {"seed": None, "trials": None})
        assert out == cfg

    def test_invalid_override_values(self):
        cfg = parse_config_text(MINIMAL)
        with pytest.raises(ConfigError):
            apply_overrides(cfg, {"trials": 0})
        with pytest.raises(ConfigError):
            apply_overrides(cfg, {"planner": "oracle"})


class TestEcho:
    def test_echo_round_trips_through_parser(self):
        """The echoed configuration is complete: feeding it back through
        the parser reproduces the same resolved settings."""
        for text in (MINIMAL, FULL):
            cfg = parse_config_text(text)
            sections = echo_config(cfg, resolved_mean=cfg.mean_constant or 0.0)
            again = parse_config_text(render_config_ini(sections))
            assert again.horizon == cfg.horizon
            assert again.trials == cfg.trials
            assert again.noise_sd == cfg.noise_sd
            assert again.seed == cfg.seed
            assert again.signal_variance == cfg.signal_variance
            assert again.field_kind == cfg.field_kind
            assert again.analytic_params == cfg.analytic_params
            assert again.explicit_targets == cfg.explicit_targets
            assert again.n_shared == cfg.n_shared

    def test_every_default_is_visible(self):
        sections = echo_config(parse_config_text(MINIMAL), resolved_mean=0.0)
        assert sections["scenario"]["trials"] == "20"
        assert sections["kernel"]["jitter"] == "0.0"
        assert sections["mean"]["constant"] == "0.0"
        assert sections["placement"]["n_shared"] == "5"


def test_config_file_loading(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text(MINIMAL)
    cfg = load_config(p, {"seed": 42})
    assert cfg.seed == 42
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.ini")
