"""Geometry of S3-invariant star-shaped radial graphs in HH^n.

A hypersurface is the radial graph of rho(theta) over the geodesic sphere,
where theta in (0, pi/2) is the lifted Fubini-Study distance on the
quaternionic projective base; invariance under the Hopf S^3 action makes
the orbit space one-dimensional.

All pointwise quantities (v, mean curvature, shape operator, |A|^2, area
density) and the orbit-weighted integrals (volume, Q functional) live
here.  Profiles sit on a uniform cell-centered grid so that the cot/tan
singular endpoints are never sampled; derivative stencils use even ghost
reflection, which encodes the Neumann symmetry of the invariant profiles.
"""

import math
from dataclasses import dataclass

import numpy as np


def make_theta_grid(grid_size: int):
    """Cell-centered nodes theta_k = (k + 1/2) * (pi/2)/N and the spacing."""
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    dtheta = (np.pi / 2) / grid_size
    theta = (np.arange(grid_size) + 0.5) * dtheta
    return theta, dtheta


@dataclass(frozen=True)
class RadialProfile:
    """Radial graph rho(theta) over the unit sphere grid, n >= 2."""

    n: int
    theta: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        theta = np.asarray(self.theta, dtype=float)
        rho = np.asarray(self.rho, dtype=float)
        if theta.ndim != 1 or theta.shape != rho.shape:
            raise ValueError("theta and rho must be 1d arrays of equal length")
        if not np.all(rho > 0):
            raise ValueError("rho must be positive everywhere")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "rho", rho)

    @property
    def grid_size(self) -> int:
        return self.theta.size

    @property
    def dtheta(self) -> float:
        return (np.pi / 2) / self.grid_size


@dataclass(frozen=True)
class ProfileDerivatives:
    """Graph-function derivatives per node: phi' = rho'/sinh rho, etc."""

    phi_t: np.ndarray
    phi_tt: np.ndarray
    v: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class ShapePointData:
    """Pointwise extrinsic data used by diagnostics and reports."""

    H: float
    H_hat: float
    v: float
    A_norm_sq: float
    area_density: float


def hat_H(n: int, rho):
    """Mean curvature of the geodesic sphere of radius rho.

    (4n-1) coth(rho) + 3 tanh(rho); tends to 4n+2 (the horosphere value)
    as rho grows and blows up like (4n-1)/rho at the origin.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("rho must be positive")
    val = (4 * n - 1) / np.tanh(rho) + 3 * np.tanh(rho)
    return float(val) if val.ndim == 0 else val


def reduced_weight(n: int, theta):
    """Drift w(theta) = (4n-5) cot(theta) - 3 tan(theta).

    This is d/dtheta of log(sin^{4n-5} theta cos^3 theta) and turns the
    round Laplacian of an invariant function into u'' + w u'.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0) or np.any(theta >= np.pi / 2):
        raise ValueError("theta must lie strictly inside (0, pi/2)")
    val = (4 * n - 5) / np.tan(theta) - 3 * np.tan(theta)
    return float(val) if val.ndim == 0 else val


def even_ghost_derivatives(values: np.ndarray, dtheta: float):
    """Second-order central first/second differences with even reflection.

    The ghost value across each end mirrors the first interior value, so
    the stencil sees a symmetric extension (zero odd part at the ends).
    """
    ext = np.empty(values.size + 2)
    ext[1:-1] = values
    ext[0] = values[0]
    ext[-1] = values[-1]
    d1 = (ext[2:] - ext[:-2]) / (2 * dtheta)
    d2 = (ext[2:] - 2 * ext[1:-1] + ext[:-2]) / dtheta**2
    return d1, d2


def profile_derivatives(profile: RadialProfile) -> ProfileDerivatives:
    """Chain rule from rho(theta) to the graph function phi, per node.

    phi' = rho'/sinh rho and phi'' = rho''/sinh rho - cosh rho (rho')^2 /
    sinh^2 rho, with rho', rho'' from the even-ghost stencils.
    """
    d1, d2 = even_ghost_derivatives(profile.rho, profile.dtheta)
    sh = np.sinh(profile.rho)
    ch = np.cosh(profile.rho)
    phi_t = d1 / sh
    phi_tt = d2 / sh - ch * d1**2 / sh**2
    v = np.sqrt(1 + phi_t**2)
    w = reduced_weight(profile.n, profile.theta)
    return ProfileDerivatives(phi_t=phi_t, phi_tt=phi_tt, v=v, w=w)


def mean_curvature_profile(profile: RadialProfile,
                           derivs: ProfileDerivatives) -> np.ndarray:
    """Mean curvature at every node of an invariant profile.

    H = [-(phi''/v^2 + w phi')/sinh rho + hat_H(rho)] / v.
    """
    sh = np.sinh(profile.rho)
    v2 = derivs.v**2
    contraction = derivs.phi_tt / v2 + derivs.w * derivs.phi_t
    return (-contraction / sh + hat_H(profile.n, profile.rho)) / derivs.v


def mean_curvature_reduced(profile: RadialProfile, derivs: ProfileDerivatives,
                           k: int) -> float:
    """Mean curvature at node k (scalar form of mean_curvature_profile)."""
    rho = profile.rho[k]
    v = derivs.v[k]
    contraction = derivs.phi_tt[k] / v**2 + derivs.w[k] * derivs.phi_t[k]
    return float((-contraction / np.sinh(rho) + hat_H(profile.n, rho)) / v)


def general_mean_curvature(n: int, rho: float, v: float,
                           hat_hessian_contraction: float,
                           vertical_gradient_sq: float) -> float:
    """Mean curvature of a general (not necessarily invariant) radial graph.

    H = -(contraction)/(v sinh rho) + hat_H/v
        + sinh rho * (vertical gradient squared) / (v^3 cosh rho),

    where the contraction is phi_ij sigma~^{ji} of the deformed-metric
    Hessian and the last term collects the squared Hopf-direction
    derivatives of phi.  Invariant profiles have that term equal to zero
    and reduce to mean_curvature_reduced.
    """
    if v < 1:
        raise ValueError(f"v must be >= 1, got {v}")
    sh, ch = math.sinh(rho), math.cosh(rho)
    return (-hat_hessian_contraction / (v * sh) + hat_H(n, rho) / v
            + sh * vertical_gradient_sq / (v**3 * ch))


def shape_operator_adapted(profile: RadialProfile, derivs: ProfileDerivatives,
                           k: int) -> np.ndarray:
    """Shape operator h_i^k at node k in the adapted orthonormal frame.

    Frame order: xi_1, xi_2, xi_3 (Hopf vertical), e_theta, J_1 e_theta,
    J_2 e_theta, J_3 e_theta, then the remaining 4n-8 horizontal
    directions.  Nonzero entries:

      vertical diagonal          2 coth(2 rho) / v
      (e_theta, e_theta)         -phi''/(v^3 sinh rho) + coth(rho)/v
      J_i e_theta diagonal       -2 phi' cot(2 theta)/(v sinh rho) + coth/v
      remaining horizontal       -phi' cot(theta)/(v sinh rho) + coth/v
      (xi_i, J_i e_theta)        cosh^2(rho) phi' / (v sinh rho)
      (J_i e_theta, xi_i)        phi' / (v sinh rho)

    The mixed tensor is not symmetric because the vertical and horizontal
    blocks of the induced metric carry different conformal factors; its
    trace equals the mean curvature and tr(S^2) gives |A|^2.
    """
    n = profile.n
    dim = 4 * n - 1
    rho = float(profile.rho[k])
    theta = float(profile.theta[k])
    phi_t = float(derivs.phi_t[k])
    phi_tt = float(derivs.phi_tt[k])
    v = float(derivs.v[k])
    sh, ch = math.sinh(rho), math.cosh(rho)
    coth = ch / sh

    S = np.zeros((dim, dim))
    mu = (sh / ch + ch / sh) / v  # 2 coth(2 rho) / v
    for i in range(3):
        S[i, i] = mu
        S[i, 4 + i] = ch**2 * phi_t / (v * sh)
        S[4 + i, i] = phi_t / (v * sh)
        S[4 + i, 4 + i] = -2 * phi_t / math.tan(2 * theta) / (v * sh) + coth / v
    S[3, 3] = -phi_tt / (v**3 * sh) + coth / v
    for j in range(7, dim):
        S[j, j] = -phi_t / math.tan(theta) / (v * sh) + coth / v
    return S


def _a_norm_sq_identity(n, theta, rho, phi_t, phi_tt, v, hatH, H):
    """|A|^2 via the closed identity in H - hat_H; vectorized.

    The contraction phi_ij phi_kh sigma~ sigma~ for invariant profiles is
    (phi'')^2/v^4 + 3 (2 phi' cot 2theta)^2 + (4n-8)(phi' cot theta)^2
    + 6 (phi')^2, the last term from the vertical/horizontal couplings.
    """
    sh = np.sinh(rho)
    ch = np.cosh(rho)
    v2 = v**2
    om = phi_t**2
    contraction = (phi_tt**2 / v2**2 + 3 * (2 * phi_t / np.tan(2 * theta))**2
                   + (4 * n - 8) * (phi_t / np.tan(theta))**2 + 6 * om)
    return (4 * (n + 2) + contraction / (v2 * sh**2) + 6 * om / v2
            + (2 * ch / (v * sh)) * (H - hatH + hatH * om / (v * (v + 1)))
            + (4 * n - 1) / (v2 * sh**2) - 3 / (v2 * ch**2)
            - 4 * (n + 2) * om / v2)


def A_norm_sq(profile: RadialProfile, derivs: ProfileDerivatives,
              k: int) -> float:
    """Squared norm of the second fundamental form at node k.

    Computed two independent ways: tr(S^2) of the adapted-frame shape
    operator, and the closed identity expressing |A|^2 - 4(n+2) through
    H - hat_H and the invariant Hessian contraction.  The two must agree
    to 1e-8 (a mismatch means a formula transcription bug); returns the
    trace value.
    """
    S = shape_operator_adapted(profile, derivs, k)
    traced = float(np.einsum("ij,ji->", S, S))
    H = mean_curvature_reduced(profile, derivs, k)
    closed = float(_a_norm_sq_identity(
        profile.n, profile.theta[k], profile.rho[k], derivs.phi_t[k],
        derivs.phi_tt[k], derivs.v[k], hat_H(profile.n, profile.rho[k]), H))
    if abs(traced - closed) > 1e-8:
        raise ValueError(
            f"|A|^2 cross-check failed at node {k}: "
            f"trace route {traced!r} vs identity route {closed!r}")
    return traced


def a_norm_sq_profile(profile: RadialProfile, derivs: ProfileDerivatives,
                      H: np.ndarray) -> np.ndarray:
    """Vectorized |A|^2 over all nodes (closed-identity route).

    The per-node A_norm_sq cross-checks this expression against the
    shape-operator trace; flow diagnostics use this form directly.
    """
    return _a_norm_sq_identity(profile.n, profile.theta, profile.rho,
                               derivs.phi_t, derivs.phi_tt, derivs.v,
                               hat_H(profile.n, profile.rho), H)


def area_element(n: int, rho, v):
    """Orbit-space area density d mu / d sigma = v sinh^{4n-1} rho cosh^3 rho.

    The cosh^3 carries the Berger stretching of the three Hopf directions
    at radius rho.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("rho must be positive")
    val = v * np.sinh(rho) ** (4 * n - 1) * np.cosh(rho) ** 3
    return float(val) if np.ndim(val) == 0 else val


def sphere_volume(n: int) -> float:
    """Volume of the round unit sphere S^{4n-1}: 2 pi^{2n} / (2n-1)!."""
    return 2 * math.pi ** (2 * n) / math.factorial(2 * n - 1)


def orbit_weights(theta: np.ndarray, n: int) -> np.ndarray:
    """Normalized midpoint weights of the orbital measure.

    J(theta) = sin^{4n-5} theta cos^3 theta is the relative volume of the
    S^3 x S^{4n-8}-type orbit through theta; normalizing by sum(J) pins
    the total measure to 1 regardless of grid size.
    """
    J = np.sin(theta) ** (4 * n - 5) * np.cos(theta) ** 3
    return J / J.sum()


def orbit_integral(values, n: int) -> float:
    """Integral over S^{4n-1} of an invariant function given per node.

    The grid is inferred from len(values): cell-centered on (0, pi/2).
    Midpoint rule with the orbital weight J, normalized so that the
    constant 1 integrates to Vol(S^{4n-1}) exactly.
    """
    values = np.asarray(values, dtype=float)
    theta, _ = make_theta_grid(values.size)
    return sphere_volume(n) * float(orbit_weights(theta, n) @ values)


def total_volume(profile: RadialProfile) -> float:
    """Hypersurface volume |M| of the radial graph, i.e. its total area."""
    derivs = profile_derivatives(profile)
    dens = area_element(profile.n, profile.rho, derivs.v)
    return orbit_integral(dens, profile.n)


def Q_functional(profile: RadialProfile) -> float:
    """Q(M) = |M|^{-1+1/(2n+1)} * integral of (H - hat_H) d mu.

    Zero exactly on geodesic spheres; the scale-invariant deviation from
    sphericity whose flow limit detects non-constant qc-scalar curvature.
    """
    n = profile.n
    derivs = profile_derivatives(profile)
    H = mean_curvature_profile(profile, derivs)
    dens = area_element(n, profile.rho, derivs.v)
    vol = orbit_integral(dens, n)
    integral = orbit_integral((H - hat_H(n, profile.rho)) * dens, n)
    return vol ** (-1 + 1 / (2 * n + 1)) * integral


def shape_point_data(profile: RadialProfile, derivs: ProfileDerivatives,
                     k: int) -> ShapePointData:
    """Bundle the pointwise extrinsic quantities at node k."""
    H = mean_curvature_reduced(profile, derivs, k)
    return ShapePointData(
        H=H,
        H_hat=float(hat_H(profile.n, profile.rho[k])),
        v=float(derivs.v[k]),
        A_norm_sq=A_norm_sq(profile, derivs, k),
        area_density=float(area_element(profile.n, profile.rho[k],
                                        derivs.v[k])),
    )
