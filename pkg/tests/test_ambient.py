"""Quaternionic algebra and ambient curvature."""

import numpy as np
import pytest

from qimcf import (BergerParams, apply_J, berger_inner, curvature_tensor,
                   hopf_frame, ricci_check, sectional, verify_ambient)


def unit(dim, k):
    e = np.zeros(dim)
    e[k] = 1.0
    return e


def test_left_multiplication_table():
    # J1 e0 = e1, J2 e0 = e2, J3 e0 = e3 per quaternion block
    for i in (1, 2, 3):
        assert np.array_equal(apply_J(i, unit(8, 0)), unit(8, i))
        assert np.array_equal(apply_J(i, unit(8, 4)), unit(8, 4 + i))


def test_J_algebra():
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = rng.standard_normal(12)
        y = rng.standard_normal(12)
        for i in (1, 2, 3):
            assert np.allclose(apply_J(i, apply_J(i, x)), -x, atol=1e-12)
            # orthogonal and skew
            assert abs(apply_J(i, x) @ apply_J(i, y) - x @ y) < 1e-12
            assert abs(apply_J(i, x) @ y + x @ apply_J(i, y)) < 1e-12
        assert np.allclose(apply_J(1, apply_J(2, x)), apply_J(3, x),
                           atol=1e-12)
        assert np.allclose(apply_J(2, apply_J(3, x)), apply_J(1, x),
                           atol=1e-12)


def test_apply_J_batched_and_errors():
    rng = np.random.default_rng(4)
    batch = rng.standard_normal((5, 3, 8))
    out = apply_J(2, batch)
    assert out.shape == batch.shape
    assert np.allclose(out[2, 1], apply_J(2, batch[2, 1]))
    with pytest.raises(ValueError):
        apply_J(0, batch)
    with pytest.raises(ValueError):
        apply_J(1, rng.standard_normal(7))


def test_hopf_frame_orthonormal_and_J_closed():
    rng = np.random.default_rng(5)
    for dim in (8, 12):
        z = rng.standard_normal(dim)
        z /= np.linalg.norm(z)
        frame = hopf_frame(z)
        assert len(frame.vertical) == 3
        assert len(frame.horizontal) == dim - 4
        vecs = [z] + frame.vectors()
        G = np.array(vecs) @ np.array(vecs).T
        assert np.allclose(G, np.eye(dim), atol=1e-12)
        # horizontal distribution closed under each J_i
        Hmat = np.array(frame.horizontal)
        for i in (1, 2, 3):
            proj = Hmat @ apply_J(i, Hmat).T
            # J_i of a horizontal vector has unit norm inside the span
            assert np.allclose(np.linalg.norm(proj, axis=1), 1.0, atol=1e-10)


def test_hopf_frame_rejects_non_unit():
    with pytest.raises(ValueError):
        hopf_frame(np.ones(8))


def test_berger_inner_round_and_scaled():
    rng = np.random.default_rng(6)
    z = rng.standard_normal(8)
    z /= np.linalg.norm(z)
    frame = hopf_frame(z)
    u = rng.standard_normal(7)
    v = rng.standard_normal(7)
    round_val = berger_inner(BergerParams(1.0), frame, u, v)
    assert abs(round_val - u @ v) < 1e-12
    lam = 3.7
    scaled = berger_inner(BergerParams(lam), frame, u, v)
    assert abs(scaled - (lam * u[:3] @ v[:3] + u[3:] @ v[3:])) < 1e-12
    with pytest.raises(ValueError):
        BergerParams(0.0)
    with pytest.raises(ValueError):
        berger_inner(BergerParams(1.0), frame, u[:5], v[:5])


def test_sectional_anchor_values():
    rng = np.random.default_rng(7)
    for _ in range(20):
        X = rng.standard_normal(8)
        X /= np.linalg.norm(X)
        # quaternionic planes
        for i in (1, 2, 3):
            assert abs(sectional(X, apply_J(i, X)) + 4.0) < 1e-12
        # plane orthogonal to the quaternionic span
        Y = rng.standard_normal(8)
        for b in (X, apply_J(1, X), apply_J(2, X), apply_J(3, X)):
            Y -= (Y @ b) * b
        Y /= np.linalg.norm(Y)
        assert abs(sectional(X, Y) + 1.0) < 1e-10


def test_sectional_range_random_pairs():
    rng = np.random.default_rng(8)
    for _ in range(200):
        X = rng.standard_normal(8)
        X /= np.linalg.norm(X)
        Y = rng.standard_normal(8)
        Y -= (Y @ X) * X
        Y /= np.linalg.norm(Y)
        K = sectional(X, Y)
        assert -4.0 - 1e-12 <= K <= -1.0 + 1e-12
        # definition agrees with the full tensor
        assert abs(K - curvature_tensor(X, Y, X, Y)) < 1e-12
    with pytest.raises(ValueError):
        sectional(np.ones(8), np.ones(8))


def test_curvature_symmetries_and_bianchi():
    rng = np.random.default_rng(9)
    for _ in range(30):
        X, Y, Z, W = (rng.standard_normal(8) for _ in range(4))
        r = curvature_tensor(X, Y, Z, W)
        assert abs(r - curvature_tensor(Z, W, X, Y)) < 1e-10
        assert abs(r + curvature_tensor(Y, X, Z, W)) < 1e-10
        assert abs(r + curvature_tensor(X, Y, W, Z)) < 1e-10
        bianchi = (r + curvature_tensor(Y, Z, X, W)
                   + curvature_tensor(Z, X, Y, W))
        assert abs(bianchi) < 1e-10


def test_curvature_injected_inner_product():
    # scaling the bilinear form by c scales the tensor by c^2 (every term
    # is a product of two metric contractions)
    rng = np.random.default_rng(10)
    c = 1.7
    scaled = lambda a, b: c * np.einsum("...i,...i->...", a, b)
    for _ in range(10):
        X, Y, Z, W = (rng.standard_normal(8) for _ in range(4))
        base = curvature_tensor(X, Y, Z, W)
        assert abs(curvature_tensor(X, Y, Z, W, inner=scaled)
                   - c**2 * base) < 1e-9 * max(1.0, abs(base))


def test_ricci_constant():
    rep = ricci_check(2, 30, seed=11)
    assert rep["expected"] == -16.0
    assert rep["max_error"] < 1e-10
    rep3 = ricci_check(3, 10, seed=11)
    assert rep3["expected"] == -20.0
    assert rep3["max_error"] < 1e-10
    with pytest.raises(ValueError):
        ricci_check(1, 5)
    with pytest.raises(ValueError):
        ricci_check(2, 0)


def test_ricci_radial_direction():
    # Ric(u,u) for the first coordinate direction, traced explicitly
    dim = 8
    u = unit(dim, 0)
    basis = np.eye(dim)
    ric = sum(float(curvature_tensor(u, e, u, e)) for e in basis)
    assert abs(ric + 16.0) < 1e-12


def test_verify_ambient_report():
    rep = verify_ambient(2, 150, seed=12)
    assert rep["sectional_range_violation"] < 1e-10
    assert rep["quaternionic_plane_error"] < 1e-10
    assert rep["real_plane_error"] < 1e-10
    assert rep["pair_symmetry_error"] < 1e-10
    assert rep["bianchi_error"] < 1e-10
    assert rep["ricci_max_error"] < 1e-10
    assert -4.0 <= rep["sectional_min"] <= rep["sectional_max"] <= -1.0
