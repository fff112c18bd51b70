"""Config parsing, validation, and sweep overrides."""

import numpy as np
import pytest

from qimcf import ConfigError, ExperimentConfig, make_theta_grid, parse_config
from qimcf.config import (build_initial_profile, check_mean_convexity,
                          override_config, validate_config)

FULL = """\
n = 2

[grid]
points = 128

# initial surface
[initial]
kind = bump
r0 = 3.0
amplitude = 0.1

[time]
t_end = 30.0
cfl_safety = 0.3

[output]
dir = out/bump
snapshot_every = 1.0

[verify]
ambient_samples = 500
"""


def test_empty_config_gives_defaults():
    assert parse_config("") == ExperimentConfig()


def test_full_config_roundtrip():
    cfg = parse_config(FULL)
    assert cfg.n == 2
    assert cfg.grid_points == 128
    assert cfg.initial_kind == "bump"
    assert cfg.initial_r0 == 3.0
    assert cfg.initial_amplitude == 0.1
    assert cfg.initial_tau == 4.0  # untouched default
    assert cfg.t_end == 30.0
    assert cfg.cfl_safety == 0.3
    assert cfg.output_dir == "out/bump"
    assert cfg.snapshot_every == 1.0
    assert cfg.ambient_samples == 500


def test_comments_and_blank_lines_ignored():
    cfg = parse_config("# header\n\nn = 3\n   \n[grid]\npoints = 64\n")
    assert cfg.n == 3
    assert cfg.grid_points == 64


def err_of(text):
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text)
    return excinfo.value


def test_unknown_global_key():
    e = err_of("bogus = 1")
    assert e.line == 1
    assert "unknown key 'bogus'" in str(e)
    assert "global scope" in str(e)


def test_unknown_section():
    e = err_of("n = 2\n[quantum]")
    assert e.line == 2
    assert "unknown section" in str(e)


def test_key_not_valid_in_section():
    e = err_of("[grid]\nn = 2")
    assert e.line == 2
    assert "unknown key 'n' in [grid]" in str(e)


def test_missing_equals():
    e = err_of("[grid]\npoints 256")
    assert e.line == 2
    assert "expected key = value" in str(e)


def test_type_mismatch_int():
    e = err_of("[grid]\npoints = many")
    assert e.line == 2
    assert "expects int" in str(e)
    assert err_of("[grid]\npoints = 128.5").line == 2


def test_type_mismatch_float():
    e = err_of("[time]\nt_end = soon")
    assert e.line == 2
    assert "expects float" in str(e)


def test_duplicate_key():
    e = err_of("n = 2\nn = 3")
    assert e.line == 2
    assert "duplicate key 'n'" in str(e)
    assert "line 1" in str(e)


@pytest.mark.parametrize("text,needle", [
    ("n = 1", "n must be >= 2"),
    ("[grid]\npoints = 16", "grid.points must be >= 32"),
    ("[initial]\nkind = torus", "initial.kind must be one of"),
    ("[initial]\nr0 = 0", "initial.r0 must be positive"),
    ("[initial]\namplitude = -0.1", "initial.amplitude must be >= 0"),
    ("[initial]\ntau = 0", "initial.tau must be positive"),
    ("[time]\nt_end = 0", "time.t_end must be positive"),
    ("[time]\ncfl_safety = 1.5", "cfl_safety must be in (0,1]"),
    ("[time]\ncfl_safety = 0", "cfl_safety must be in (0,1]"),
    ("[output]\nsnapshot_every = 0", "snapshot_every must be positive"),
    ("[verify]\nambient_samples = 0", "ambient_samples must be >= 1"),
])
def test_invariant_violations(text, needle):
    e = err_of(text)
    assert needle in str(e)
    assert e.line is None  # semantic, not syntactic


def test_mean_convexity_refusal():
    e = err_of("[initial]\nkind = bump\nr0 = 1.0\namplitude = 0.9")
    assert "not mean convex" in str(e)
    assert "theta =" in str(e)
    assert "min H" in str(e)


def test_check_mean_convexity_accepts_good_profiles():
    check_mean_convexity(ExperimentConfig())
    check_mean_convexity(ExperimentConfig(
        initial_kind="bump", initial_r0=3.0, initial_amplitude=0.1))


def test_build_initial_profile_uses_config():
    cfg = ExperimentConfig(initial_kind="tau_family", initial_tau=5.0,
                           initial_amplitude=0.2, grid_points=64)
    profile = build_initial_profile(cfg)
    assert profile.grid_size == 64
    theta, _ = make_theta_grid(64)
    assert np.array_equal(profile.rho, 5.0 + 0.2 * np.cos(2 * theta))


def test_validate_config_is_reusable():
    validate_config(ExperimentConfig())
    with pytest.raises(ConfigError):
        validate_config(ExperimentConfig(grid_points=8))


def test_override_dotted_key():
    base = ExperimentConfig()
    out = override_config(base, "initial.tau", "5.5")
    assert out.initial_tau == 5.5
    assert base.initial_tau == 4.0
    assert out.n == base.n


def test_override_bare_attribute():
    out = override_config(ExperimentConfig(), "grid_points", "64")
    assert out.grid_points == 64
    out = override_config(ExperimentConfig(), "t_end", "10")
    assert out.t_end == 10.0


def test_override_unknown_key():
    with pytest.raises(ConfigError) as excinfo:
        override_config(ExperimentConfig(), "quantum.flux", "1")
    assert "unknown config key" in str(excinfo.value)


def test_override_bad_value():
    with pytest.raises(ConfigError) as excinfo:
        override_config(ExperimentConfig(), "grid.points", "many")
    assert "expects int" in str(excinfo.value)


def test_override_revalidates():
    with pytest.raises(ConfigError):
        override_config(ExperimentConfig(), "grid.points", "16")


def test_override_defers_convexity_to_run_time():
    # amplitude alone passes static validation; the run entry point is
    # responsible for the surface-level refusal
    out = override_config(ExperimentConfig(initial_kind="bump"),
                          "initial.amplitude", "0.9")
    assert out.initial_amplitude == 0.9
    with pytest.raises(ConfigError):
        check_mean_convexity(out)
