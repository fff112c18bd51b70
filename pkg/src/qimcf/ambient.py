"""Quaternionic linear algebra and ambient curvature of HH^n.

Points and tangent vectors of R^{4n} are plain float64 numpy arrays whose
last axis has length 4n, read as n quaternion blocks (w, x, y, z).  The
three complex structures J1, J2, J3 act blockwise by LEFT multiplication
with the imaginary units i, j, k (so J1 e0 = e1 and J1 J2 = J3).

The curvature tensor of quaternionic hyperbolic space is evaluated in the
unit-tangent-space model: the metric is the Euclidean inner product unless
a different bilinear form is injected through the ``inner`` argument.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

Inner = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _euclidean(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", x, y)


def apply_J(i: int, x: np.ndarray) -> np.ndarray:
    """Apply the complex structure J_i, blockwise left quaternion product.

    Accepts any batch shape (..., 4n) and preserves it.  Norm-preserving
    and skew: <J_i x, y> = -<x, J_i y>.
    """
    if i not in (1, 2, 3):
        raise ValueError(f"complex structure index must be 1, 2 or 3, got {i}")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] % 4 != 0:
        raise ValueError(f"last axis must have length 4n, got {x.shape[-1]}")
    q = x.reshape(x.shape[:-1] + (-1, 4))
    w, a, b, c = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    if i == 1:
        out = np.stack([-a, w, -c, b], axis=-1)
    elif i == 2:
        out = np.stack([-b, c, w, -a], axis=-1)
    else:
        out = np.stack([-c, -b, a, w], axis=-1)
    return out.reshape(x.shape)


@dataclass(frozen=True)
class BergerParams:
    """Berger deformation parameter; lambda_ = 1 recovers the round metric."""

    lambda_: float

    def __post_init__(self):
        if not self.lambda_ > 0:
            raise ValueError(f"Berger parameter must be positive, got {self.lambda_}")


@dataclass(frozen=True)
class TangentFrame:
    """Orthonormal tangent frame of S^{4n-1} at base_point.

    vertical holds the three Hopf fields xi_i = J_i(base_point); horizontal
    holds the remaining 4n-4 directions, closed under every J_i.
    """

    base_point: np.ndarray
    vertical: tuple
    horizontal: tuple

    @property
    def n(self) -> int:
        return self.base_point.shape[-1] // 4

    def vectors(self) -> list:
        """All 4n-1 frame vectors, vertical first."""
        return list(self.vertical) + list(self.horizontal)


def hopf_frame(z: np.ndarray) -> TangentFrame:
    """Tangent frame at a unit point z: Hopf fields plus horizontal completion.

    The horizontal part is built deterministically: standard basis vectors
    are run through modified Gram-Schmidt (with one re-orthogonalization
    pass) against everything accepted so far; each surviving seed s brings
    its quaternionic span {s, J1 s, J2 s, J3 s}, which is automatically
    orthonormal and J-closed.
    """
    z = np.asarray(z, dtype=float)
    dim = z.shape[-1]
    if z.ndim != 1 or dim % 4 != 0:
        raise ValueError("base point must be a single vector of length 4n")
    if abs(np.linalg.norm(z) - 1.0) > 1e-12:
        raise ValueError(f"base point must be unit, |z| = {np.linalg.norm(z)!r}")

    vertical = tuple(apply_J(i, z) for i in (1, 2, 3))
    accepted = [z, *vertical]
    horizontal = []
    for k in range(dim):
        if len(horizontal) == dim - 4:
            break
        seed = np.zeros(dim)
        seed[k] = 1.0
        for _ in range(2):  # MGS with re-orthogonalization
            for b in accepted:
                seed = seed - (seed @ b) * b
        norm = np.linalg.norm(seed)
        if norm < 1e-8:
            continue
        seed /= norm
        group = [seed] + [apply_J(i, seed) for i in (1, 2, 3)]
        accepted.extend(group)
        horizontal.extend(group)
    return TangentFrame(base_point=z, vertical=vertical, horizontal=tuple(horizontal))


def berger_inner(params: BergerParams, frame: TangentFrame,
                 u_coords: Sequence[float], v_coords: Sequence[float]) -> float:
    """Berger metric e_lambda in frame coordinates (3 vertical, then horizontal).

    e_lambda = lambda * (vertical dot) + (horizontal dot); lambda_=1 is the
    round metric sigma.
    """
    u = np.asarray(u_coords, dtype=float)
    v = np.asarray(v_coords, dtype=float)
    want = 4 * frame.n - 1
    if u.shape != (want,) or v.shape != (want,):
        raise ValueError(f"coordinate sequences must have length {want}")
    return float(params.lambda_ * (u[:3] @ v[:3]) + u[3:] @ v[3:])


def curvature_tensor(X, Y, Z, W, inner: Optional[Inner] = None) -> np.ndarray:
    """Curvature R(X,Y,Z,W) of HH^n (sectional range [-4,-1] convention).

    R = -g(X,Z)g(Y,W) + g(X,W)g(Y,Z)
        - sum_i [ g(X,J_i Z)g(Y,J_i W) - g(X,J_i W)g(Y,J_i Z) ]
        - 2 sum_i g(X,J_i Y) g(Z,J_i W)

    ``inner`` defaults to the Euclidean product of the unit-tangent-space
    model; any symmetric bilinear form can be injected instead.  Broadcasts
    over batch axes.
    """
    g = inner if inner is not None else _euclidean
    X, Y, Z, W = (np.asarray(a, dtype=float) for a in (X, Y, Z, W))
    val = -g(X, Z) * g(Y, W) + g(X, W) * g(Y, Z)
    for i in (1, 2, 3):
        JZ, JW, JY = apply_J(i, Z), apply_J(i, W), apply_J(i, Y)
        val = val - (g(X, JZ) * g(Y, JW) - g(X, JW) * g(Y, JZ))
        val = val - 2.0 * g(X, JY) * g(Z, JW)
    return val


def sectional(X, Y, inner: Optional[Inner] = None) -> np.ndarray:
    """Sectional curvature of the plane span{X, Y}, X, Y orthonormal.

    K = -1 - 3 sum_i g(X, J_i Y)^2, which lies in [-4, -1]: the extremes
    are attained on quaternionic planes (Y in span{J_i X}) and on totally
    real planes.
    """
    g = inner if inner is not None else _euclidean
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    bad = (np.abs(g(X, X) - 1) > 1e-8) | (np.abs(g(Y, Y) - 1) > 1e-8) \
        | (np.abs(g(X, Y)) > 1e-8)
    if np.any(bad):
        raise ValueError("sectional requires an orthonormal pair")
    val = np.zeros(np.broadcast(g(X, X), g(Y, Y)).shape)
    for i in (1, 2, 3):
        val = val + g(X, apply_J(i, Y)) ** 2
    return -1.0 - 3.0 * val


def random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_orthonormal_pair(rng: np.random.Generator, dim: int):
    X = random_unit(rng, dim)
    Y = rng.standard_normal(dim)
    Y -= (Y @ X) * X
    return X, Y / np.linalg.norm(Y)


def ricci_check(n: int, samples: int, seed: int = 0) -> dict:
    """Trace the curvature form over an orthonormal frame at sampled directions.

    HH^n is Einstein with Ric = -4(n+2) g; reports the worst deviation of
    Ric(u,u) from that constant over ``samples`` random unit vectors.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    dim = 4 * n
    expected = -4.0 * (n + 2)
    worst = 0.0
    for _ in range(samples):
        u = random_unit(rng, dim)
        M = np.column_stack([u, rng.standard_normal((dim, dim - 1))])
        basis = np.linalg.qr(M)[0].T  # rows orthonormal, first row = +-u
        ric = float(sum(curvature_tensor(u, e, u, e) for e in basis))
        worst = max(worst, abs(ric - expected))
    return {"n": n, "samples": samples, "expected": expected, "max_error": worst}


def verify_ambient(n: int, samples: int, seed: int = 0) -> dict:
    """Curvature verification report: sectional range, anchor values,
    tensor symmetries, first Bianchi, and the Einstein constant.

    Returns a dict of worst-case residuals; the CLI and the acceptance
    suite assert the tolerances.
    """
    rng = np.random.default_rng(seed)
    dim = 4 * n
    report = {"n": n, "samples": samples}

    sec_lo, sec_hi = np.inf, -np.inf
    quat_err = 0.0
    for _ in range(samples):
        X, Y = random_orthonormal_pair(rng, dim)
        K = float(sectional(X, Y))
        sec_lo, sec_hi = min(sec_lo, K), max(sec_hi, K)
        i = int(rng.integers(1, 4))
        quat_err = max(quat_err, abs(float(sectional(X, apply_J(i, X))) + 4.0))
    report["sectional_min"] = sec_lo
    report["sectional_max"] = sec_hi
    # violation of the closed range [-4, -1]
    report["sectional_range_violation"] = max(0.0, -4.0 - sec_lo, sec_hi - (-1.0))
    report["quaternionic_plane_error"] = quat_err

    # totally real planes: X in one quaternionic block, Y in another
    real_err = 0.0
    for _ in range(min(samples, 100)):
        a = rng.standard_normal(4)
        b = rng.standard_normal(4)
        X = np.zeros(dim)
        Y = np.zeros(dim)
        X[:4] = a / np.linalg.norm(a)
        Y[4:8] = b / np.linalg.norm(b)
        real_err = max(real_err, abs(float(sectional(X, Y)) + 1.0))
    report["real_plane_error"] = real_err

    sym_err = bianchi_err = 0.0
    for _ in range(min(samples, 200)):
        X, Y, Z, W = (rng.standard_normal(dim) for _ in range(4))
        r = float(curvature_tensor(X, Y, Z, W))
        sym_err = max(sym_err,
                      abs(r - float(curvature_tensor(Z, W, X, Y))),
                      abs(r + float(curvature_tensor(Y, X, Z, W))))
        bianchi_err = max(bianchi_err,
                          abs(r + float(curvature_tensor(Y, Z, X, W))
                              + float(curvature_tensor(Z, X, Y, W))))
    report["pair_symmetry_error"] = sym_err
    report["bianchi_error"] = bianchi_err

    report["ricci_max_error"] = ricci_check(n, min(samples, 100), seed=seed)["max_error"]
    return report
