"""Experiment configuration: a small line-based text format.

Grammar: `key = value` lines grouped under `[section]` headers; the
single global key `n` appears before any section.  Blank lines and lines
starting with `#` are ignored.  Unknown keys, bad types, and invariant
violations are rejected with the offending line number, which is why
this stays a hand-rolled parser rather than an off-the-shelf INI reader.

Example:

    n = 2

    [grid]
    points = 256

    [initial]
    kind = bump
    r0 = 3.0
    amplitude = 0.1

    [time]
    t_end = 40.0

    [output]
    dir = out/bump
    snapshot_every = 0.5
"""

from dataclasses import dataclass, fields

import numpy as np

from .flow import initial_profile
from .geometry import mean_curvature_profile, profile_derivatives

INITIAL_KINDS = ("sphere", "bump", "tau_family")


class ConfigError(Exception):
    """Configuration rejection; carries the source line when known."""

    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment parameters with defaults applied."""

    n: int = 2
    grid_points: int = 256
    initial_kind: str = "sphere"
    initial_r0: float = 1.0
    initial_amplitude: float = 0.0
    initial_tau: float = 4.0
    t_end: float = 40.0
    cfl_safety: float = 0.4
    output_dir: str = "out"
    snapshot_every: float = 0.5
    ambient_samples: int = 1000


# (section, key) -> (attribute, converter); the global n has section "".
_SCHEMA = {
    ("", "n"): ("n", int),
    ("grid", "points"): ("grid_points", int),
    ("initial", "kind"): ("initial_kind", str),
    ("initial", "r0"): ("initial_r0", float),
    ("initial", "amplitude"): ("initial_amplitude", float),
    ("initial", "tau"): ("initial_tau", float),
    ("time", "t_end"): ("t_end", float),
    ("time", "cfl_safety"): ("cfl_safety", float),
    ("output", "dir"): ("output_dir", str),
    ("output", "snapshot_every"): ("snapshot_every", float),
    ("verify", "ambient_samples"): ("ambient_samples", int),
}

_SECTIONS = {s for s, _ in _SCHEMA if s}


def validate_config(cfg: ExperimentConfig):
    """Invariant checks shared by the parser and programmatic construction."""
    if cfg.n < 2:
        raise ConfigError(f"n must be >= 2, got {cfg.n}")
    if cfg.grid_points < 32:
        raise ConfigError(f"grid.points must be >= 32, got {cfg.grid_points}")
    if cfg.initial_kind not in INITIAL_KINDS:
        raise ConfigError(
            f"initial.kind must be one of {', '.join(INITIAL_KINDS)}, "
            f"got {cfg.initial_kind!r}")
    if cfg.initial_r0 <= 0:
        raise ConfigError(f"initial.r0 must be positive, got {cfg.initial_r0}")
    if cfg.initial_amplitude < 0:
        raise ConfigError(
            f"initial.amplitude must be >= 0, got {cfg.initial_amplitude}")
    if cfg.initial_tau <= 0:
        raise ConfigError(f"initial.tau must be positive, got {cfg.initial_tau}")
    if cfg.t_end <= 0:
        raise ConfigError(f"time.t_end must be positive, got {cfg.t_end}")
    if not 0 < cfg.cfl_safety <= 1:
        raise ConfigError(
            f"time.cfl_safety must be in (0,1], got {cfg.cfl_safety}")
    if cfg.snapshot_every <= 0:
        raise ConfigError(
            f"output.snapshot_every must be positive, got {cfg.snapshot_every}")
    if cfg.ambient_samples < 1:
        raise ConfigError(
            f"verify.ambient_samples must be >= 1, got {cfg.ambient_samples}")


def build_initial_profile(cfg: ExperimentConfig):
    """Construct the configured initial surface."""
    return initial_profile(cfg.n, cfg.grid_points, cfg.initial_kind,
                           r0=cfg.initial_r0, amplitude=cfg.initial_amplitude,
                           tau=cfg.initial_tau)


def check_mean_convexity(cfg: ExperimentConfig):
    """Refuse configurations whose initial surface is not mean convex.

    The flow speed 1/H is undefined at H <= 0, so the run must not start;
    the error lists the offending theta values to make the bad amplitude
    obvious.
    """
    profile = build_initial_profile(cfg)
    H = mean_curvature_profile(profile, profile_derivatives(profile))
    bad = np.flatnonzero(H <= 0)
    if bad.size:
        shown = ", ".join(f"{profile.theta[k]:.4f}" for k in bad[:5])
        more = "" if bad.size <= 5 else f" (+{bad.size - 5} more)"
        raise ConfigError(
            f"initial profile is not mean convex: H <= 0 at theta = "
            f"{shown}{more}; min H = {H.min():.6g}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a config; errors carry line numbers."""
    values = {}
    seen = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if (section, key) not in _SCHEMA:
            where = f"[{section}]" if section else "the global scope"
            raise ConfigError(f"unknown key {key!r} in {where}", lineno)
        attr, conv = _SCHEMA[(section, key)]
        if attr in seen:
            raise ConfigError(
                f"duplicate key {key!r} (first set on line {seen[attr]})",
                lineno)
        try:
            values[attr] = conv(value)
        except ValueError:
            raise ConfigError(
                f"{key!r} expects {conv.__name__}, got {value!r}", lineno)
        seen[attr] = lineno

    cfg = ExperimentConfig(**values)
    validate_config(cfg)
    check_mean_convexity(cfg)
    return cfg


def override_config(cfg: ExperimentConfig, dotted_key: str,
                    value: str) -> ExperimentConfig:
    """Replace one field addressed by its config name (e.g. initial.tau).

    Used by parameter sweeps; the value string goes through the same
    converter as the parser.  Bare attribute names are accepted too.
    """
    section, _, key = dotted_key.partition(".")
    if not key:
        section, key = "", dotted_key
    if (section, key) in _SCHEMA:
        attr, conv = _SCHEMA[(section, key)]
    else:
        by_attr = {a: c for a, c in _SCHEMA.values()}
        if dotted_key not in by_attr:
            raise ConfigError(f"unknown config key {dotted_key!r}")
        attr, conv = dotted_key, by_attr[dotted_key]
    try:
        converted = conv(value)
    except ValueError:
        raise ConfigError(f"{dotted_key!r} expects {conv.__name__}, "
                          f"got {value!r}")
    kwargs = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    kwargs[attr] = converted
    out = ExperimentConfig(**kwargs)
    validate_config(out)
    return out
