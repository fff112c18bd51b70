"""Post-processing of long-time flow data.

The rescaled profiles rho(theta, t) - t/(2(2n+1)) settle down to a
function f(theta), the conformal factor of the sub-Riemannian limit
metric e^{2f} sigma_sR.  This module extracts f from snapshots, evaluates
the limiting value of the Q functional as a functional of f alone, fits
exponential decay rates of monitored quantities, and renders the
constancy verdict that certifies a non-round limit.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .geometry import (RadialProfile, orbit_integral, orbit_weights,
                       reduced_weight)

T_USABLE = 10.0  # snapshots earlier than this sit in the initial layer


@dataclass(frozen=True)
class ConformalFactor:
    """Zero-mean limit profile f on the theta grid.

    cauchy_residual is the max-norm difference between the extraction at
    t_extracted and the one at the nearest usable half-time snapshot; it
    quantifies how settled the limit is, without asserting a rate.
    """

    n: int
    theta: np.ndarray
    f: np.ndarray
    t_extracted: float
    cauchy_residual: float


def _centered_f(profile: RadialProfile) -> np.ndarray:
    wts = orbit_weights(profile.theta, profile.n)
    return profile.rho - float(wts @ profile.rho)


def extract_conformal_factor(
        snapshots: Sequence[Tuple[float, RadialProfile]]) -> ConformalFactor:
    """Read f off the latest snapshot, normalized to zero orbit mean.

    The additive constant of f is pure gauge for every downstream
    quantity (limit_Q is invariant, the range ignores it), so the
    orbit-weighted mean is removed; that also makes runs with different
    initial radii directly comparable.  Requires at least two snapshots
    at t >= 10; the second-latest time closest to half the final one
    supplies the Cauchy residual.
    """
    usable = sorted((float(t), p) for t, p in snapshots if t >= T_USABLE)
    if len(usable) < 2:
        raise ValueError(
            f"need at least two snapshots at t >= {T_USABLE}, "
            f"got {len(usable)}")
    t_final, final = usable[-1]
    half_t, half = min(usable[:-1], key=lambda tp: abs(tp[0] - t_final / 2))
    f = _centered_f(final)
    residual = float(np.max(np.abs(f - _centered_f(half))))
    return ConformalFactor(n=final.n, theta=final.theta, f=f,
                           t_extracted=t_final, cauchy_residual=residual)


def _derivatives4(values: np.ndarray, dtheta: float):
    """Fourth-order central differences with two even ghost layers.

    The limit functional is evaluated once per run on settled data, so
    the extra accuracy is free and keeps the quadrature, not the
    stencils, as the dominant error term.
    """
    ext = np.empty(values.size + 4)
    ext[2:-2] = values
    ext[1], ext[0] = values[0], values[1]
    ext[-2], ext[-1] = values[-1], values[-2]
    d1 = (-ext[4:] + 8 * ext[3:-1] - 8 * ext[1:-3] + ext[:-4]) / (12 * dtheta)
    d2 = (-ext[4:] + 16 * ext[3:-1] - 30 * ext[2:-2] + 16 * ext[1:-3]
          - ext[:-4]) / (12 * dtheta**2)
    return d1, d2


def limit_Q(factor: ConformalFactor, n: int) -> float:
    """Limiting Q of the flow as a functional of the conformal factor.

    With z = e^{-f} and m = 2n+1:

      limit_Q = (I[e^{2mf}])^{-1+1/m} * I[e^{2mf}(z Lap z - m |z'|^2)]

    where I is the orbit integral and Lap z = z'' + w z' is the invariant
    round Laplacian.  Vanishes iff f is constant (for invariant f);
    invariant under f -> f + const by homogeneity of the two factors.
    """
    theta = factor.theta
    dtheta = (np.pi / 2) / theta.size
    m = 2 * n + 1
    z = np.exp(-factor.f)
    zp, zpp = _derivatives4(z, dtheta)
    lap = zpp + reduced_weight(n, theta) * zp
    weight = np.exp(2 * m * factor.f)
    num = orbit_integral(weight * (z * lap - m * zp**2), n)
    den = orbit_integral(weight, n)
    return den ** (-1 + 1 / m) * num


@dataclass(frozen=True)
class ConstancyVerdict:
    """Outcome of the constant-curvature test for the limit metric."""

    verdict: str  # CONSTANT or NON_CONSTANT
    f_range: float
    limit_Q: float


def constancy_verdict(factor: ConformalFactor, tol: float) -> ConstancyVerdict:
    """Classify the limit: CONSTANT if max f - min f < tol.

    For invariant f, constant qc-scalar curvature of e^{2f} sigma_sR is
    equivalent to f being constant, so the range test is the direct
    criterion; a NON_CONSTANT verdict together with |limit_Q| > tol is
    the quantitative certificate (a nonzero limiting Q cannot come from
    a round limit).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    f_range = float(factor.f.max() - factor.f.min())
    verdict = "CONSTANT" if f_range < tol else "NON_CONSTANT"
    return ConstancyVerdict(verdict=verdict, f_range=f_range,
                            limit_Q=limit_Q(factor, factor.n))


def fit_decay_rate(series: Sequence[Tuple[float, float]],
                   t_min: float) -> Tuple[float, float, float]:
    """Least-squares exponential rate of a positive series.

    Fits log y = rate * t + intercept over the points with t >= t_min and
    returns (rate, intercept, r_squared).  Decaying series give negative
    rates.  A perfectly flat series has r_squared = 1 by convention
    (zero residual, zero variance).
    """
    pts = [(float(t), float(y)) for t, y in series if t >= t_min]
    if len(pts) < 10:
        raise ValueError(f"need at least 10 points with t >= {t_min}, "
                         f"got {len(pts)}")
    t = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(y <= 0):
        raise ValueError("series values must be positive to fit a log rate")
    logy = np.log(y)
    A = np.column_stack([t, np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(A, logy, rcond=None)
    rate, intercept = float(coef[0]), float(coef[1])
    resid = logy - A @ coef
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((logy - logy.mean()) ** 2))
    # variance at the last-ulp level is flatness, not signal
    flat_floor = (1e-13 * max(1.0, float(np.max(np.abs(logy))))) ** 2 \
        * logy.size
    r_squared = 1.0 if ss_tot <= flat_floor else 1.0 - ss_res / ss_tot
    return rate, intercept, r_squared
