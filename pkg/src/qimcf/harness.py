"""Experiment orchestration: runs, parameter sweeps, file emission.

Output contract per run directory:

  diagnostics.csv       one row per record time, schema DiagnosticsRecord
  snapshot_t{T}.csv     theta,rho profile at each record time
  report.json           limit-analysis summary (success only, never partial)
  decay.dat             gnuplot-ready decay table (# comment header)

Exit codes: 0 success, 1 configuration or verification failure, 2 mean
convexity lost, 3 step-size collapse.  Sweeps run one cell per worker
process and classify failures per cell without aborting the sweep.
"""

import csv
import itertools
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

from . import ambient
from .config import (ConfigError, ExperimentConfig, build_initial_profile,
                     check_mean_convexity, override_config, validate_config)
from .flow import (DiagnosticsRecord, FlowState, MeanConvexityLost,
                   StepControl, StiffnessError, run_flow)
from .limits import constancy_verdict, extract_conformal_factor, fit_decay_rate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CONVEXITY_LOST = 2
EXIT_STIFFNESS = 3

VERDICT_TOL = 1e-6  # range threshold separating CONSTANT from NON_CONSTANT
FIT_T_MIN = 10.0    # decay fits skip the initial layer

SWEEP_COLUMNS = ("tau", "amplitude", "Q_final", "limit_Q", "verdict",
                 "min_H_over_run")


@dataclass(frozen=True)
class ExperimentResult:
    """What a single run produced, for callers that aggregate."""

    exit_code: int
    out_dir: str
    report: Optional[dict]
    min_H_over_run: Optional[float]


def resolve_out_dir(cfg: ExperimentConfig,
                    out_dir: Optional[str] = None) -> Path:
    """Output directory priority: explicit arg, QIMCF_OUT, then config."""
    return Path(out_dir or os.environ.get("QIMCF_OUT") or cfg.output_dir)


def _write_csv(path: Path, header: Sequence[str], rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_snapshot(out: Path, state: FlowState):
    path = out / f"snapshot_t{state.t:g}.csv"
    # repr of a Python float round-trips exactly (numpy scalars do not)
    rows = zip((repr(float(x)) for x in state.profile.theta),
               (repr(float(x)) for x in state.profile.rho))
    _write_csv(path, ("theta", "rho"), rows)


def _write_diagnostics(out: Path, records: Sequence[DiagnosticsRecord]):
    rows = [[repr(getattr(rec, name)) for name in DiagnosticsRecord.FIELDS]
            for rec in records]
    _write_csv(out / "diagnostics.csv", DiagnosticsRecord.FIELDS, rows)


def _write_decay_table(out: Path, records: Sequence[DiagnosticsRecord],
                       n: int):
    """Decay table for plotting: t, sup(phi')^2, max|H - (4n+2)|, |Q|."""
    horo = 4 * n + 2
    with open(out / "decay.dat", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# t sup_grad_phi_sq H_dev_max abs_Q\n")
        for rec in records:
            h_dev = max(abs(rec.H_min - horo), abs(rec.H_max - horo))
            fh.write(f"{rec.t!r} {rec.sup_grad_phi_sq!r} {h_dev!r} "
                     f"{abs(rec.Q)!r}\n")


def _fit_or_none(series, t_min: float) -> Optional[float]:
    """Decay rate, or None when the series is unfittable (zeros, too short)."""
    try:
        rate, _, _ = fit_decay_rate(series, t_min)
    except ValueError:
        return None
    return rate


def run_experiment(cfg: ExperimentConfig,
                   out_dir: Optional[str] = None) -> ExperimentResult:
    """Run one configured flow and write the output files.

    Raises ConfigError for invalid configurations (nothing is written);
    integration failures are reported through the exit code with the
    diagnostics and snapshots collected so far on disk, and no
    report.json.
    """
    validate_config(cfg)
    check_mean_convexity(cfg)
    out = resolve_out_dir(cfg, out_dir)
    out.mkdir(parents=True, exist_ok=True)

    state0 = FlowState(t=0.0, profile=build_initial_profile(cfg))
    ctrl = StepControl(t_end=cfg.t_end, cfl_safety=cfg.cfl_safety)

    records = []
    snapshots = []

    def observer(state, record):
        records.append(record)
        snapshots.append((state.t, state.profile))
        _write_snapshot(out, state)

    try:
        run_flow(state0, ctrl, observers=[observer],
                 record_every=cfg.snapshot_every)
    except MeanConvexityLost as err:
        logger.error("run failed, %s", err)
        _write_diagnostics(out, records)
        return ExperimentResult(EXIT_CONVEXITY_LOST, str(out), None,
                                _min_H(records))
    except StiffnessError as err:
        logger.error("run failed, %s", err)
        _write_diagnostics(out, records)
        return ExperimentResult(EXIT_STIFFNESS, str(out), None,
                                _min_H(records))

    _write_diagnostics(out, records)
    _write_decay_table(out, records, cfg.n)

    try:
        factor = extract_conformal_factor(snapshots)
    except ValueError as err:
        raise ConfigError(
            f"limit analysis needs t_end comfortably past 2*{FIT_T_MIN:g} "
            f"with at least two snapshots at t >= {FIT_T_MIN:g}: {err}")
    verdict = constancy_verdict(factor, VERDICT_TOL)

    horo = 4 * cfg.n + 2
    grad_series = [(r.t, r.sup_grad_phi_sq) for r in records]
    h_series = [(r.t, max(abs(r.H_min - horo), abs(r.H_max - horo)))
                for r in records]
    report = {
        "n": cfg.n,
        "grid_size": cfg.grid_points,
        "t_end": cfg.t_end,
        "f_range": verdict.f_range,
        "limit_Q": verdict.limit_Q,
        "Q_final": records[-1].Q,
        "verdict": verdict.verdict,
        "decay_rates": {
            "grad_phi": _fit_or_none(grad_series, FIT_T_MIN),
            "H": _fit_or_none(h_series, FIT_T_MIN),
        },
        "cauchy_residual": factor.cauchy_residual,
    }
    with open(out / "report.json", "w", encoding="utf-8",
              newline="\n") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return ExperimentResult(EXIT_OK, str(out), report, _min_H(records))


def _min_H(records) -> Optional[float]:
    return min((r.H_min for r in records), default=None)


def _cell_name(overrides: Sequence[Tuple[str, str]]) -> str:
    return "_".join(f"{key.rpartition('.')[2]}={val}"
                    for key, val in overrides)


def _sweep_cell(item):
    """Worker body: run one cell, classify, never raise across the pool."""
    cfg, out_dir, overrides = item
    row = {
        "tau": repr(cfg.initial_tau),
        "amplitude": repr(cfg.initial_amplitude),
        "Q_final": "",
        "limit_Q": "",
        "verdict": "FAILED",
        "min_H_over_run": "",
    }
    try:
        result = run_experiment(cfg, out_dir=out_dir)
    except ConfigError as err:
        logger.error("sweep cell %s refused: %s", _cell_name(overrides), err)
        return row
    if result.min_H_over_run is not None:
        row["min_H_over_run"] = repr(result.min_H_over_run)
    if result.exit_code != EXIT_OK:
        logger.error("sweep cell %s failed with exit code %d",
                     _cell_name(overrides), result.exit_code)
        return row
    row["Q_final"] = repr(result.report["Q_final"])
    row["limit_Q"] = repr(result.report["limit_Q"])
    row["verdict"] = result.report["verdict"]
    return row


def sweep(cfg: ExperimentConfig,
          vary: Sequence[Tuple[str, Sequence[str]]],
          out_dir: Optional[str] = None,
          max_workers: Optional[int] = None) -> list:
    """Cartesian-product parameter sweep, one flow per worker process.

    vary is a sequence of (config key, value strings); cells are laid out
    in lexicographic order of the given axes.  Each cell writes a full
    run directory under the sweep output dir; the aggregate sweep.csv is
    written single-threaded at the end.  Failed cells keep their verdict
    FAILED row (numeric columns empty) and do not stop the sweep.

    Returns the aggregate rows as dicts in cell order.
    """
    if not vary:
        raise ConfigError("sweep needs at least one key to vary")
    base = resolve_out_dir(cfg, out_dir)
    base.mkdir(parents=True, exist_ok=True)

    axes = [[(key, val) for val in values] for key, values in vary]
    items = []
    for combo in itertools.product(*axes):
        cell_cfg = cfg
        for key, val in combo:
            cell_cfg = override_config(cell_cfg, key, val)
        items.append((cell_cfg, str(base / _cell_name(combo)), combo))

    workers = max_workers or min(len(items), os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_cell, items))
    else:
        rows = [_sweep_cell(item) for item in items]

    _write_csv(base / "sweep.csv", SWEEP_COLUMNS,
               [[row[c] for c in SWEEP_COLUMNS] for row in rows])
    return rows


AMBIENT_TOLERANCES = {
    "sectional_range_violation": 1e-10,
    "quaternionic_plane_error": 1e-10,
    "real_plane_error": 1e-10,
    "pair_symmetry_error": 1e-10,
    "bianchi_error": 1e-10,
    "ricci_max_error": 1e-10,
}


def verify_ambient_report(n: int, samples: int, seed: int = 0):
    """Ambient curvature verification with pass/fail per check.

    Returns (full report, list of (name, value, tolerance, passed), all_ok).
    """
    report = ambient.verify_ambient(n, samples, seed=seed)
    checks = [(name, report[name], tol, report[name] < tol)
              for name, tol in AMBIENT_TOLERANCES.items()]
    return report, checks, all(ok for _, _, _, ok in checks)
