import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bigktype.mat2c import Mat2C, random_k
from bigktype.su2rep import (character, check_indices, chi_star_eta, chi_star_eta_sum, haar_grid, jacobi_poly,
                             jacobi_series, k_from_euler, restriction_identity, restriction_profile,
                             wigner_d_matrix, wigner_phi, wigner_phi_sum)

seeds = st.integers(0, 2 ** 32 - 1)
angles = st.floats(-math.pi, math.pi)


def test_euler_examples():
    assert np.allclose(k_from_euler(0, 0, 0).array(), np.eye(2))
    assert np.allclose(k_from_euler(0, math.pi / 2, 0).array(), [[0, 1j], [1j, 0]])


@given(angles, angles, angles)
def test_euler_reconstruction(u, v, w):
    k = k_from_euler(u, v, w).array()
    assert np.allclose(k @ k.conj().T, np.eye(2), atol=1e-12)
    assert abs(np.linalg.det(k) - 1) < 1e-12
    # the two angle triples name the same element
    assert np.allclose(k, k_from_euler(u + math.pi / 2, -v, w - math.pi / 2).array(), atol=1e-12)


def test_haar_grid_moments():
    grid = haar_grid(12, 12, 12)
    assert abs(grid.integrate(lambda a, b: np.ones_like(a.real)) - 1) < 1e-12
    # Schur: int |Phi^1_{1,1}|^2 = int |alpha|^4 = 1/3
    assert grid.integrate(lambda a, b: np.abs(a) ** 4) == pytest.approx(1 / 3, abs=1e-13)
    chi = np.array([character(1, k_from_euler(*t)) for t in zip(grid.u, grid.v, grid.w)])
    assert np.dot(grid.weights, np.abs(chi) ** 2) / 9 == pytest.approx(1, abs=1e-12)


def test_schur_orthogonality_grid():
    grid = haar_grid(14, 14, 14)
    al, be = grid.alpha_beta()
    ks = [Mat2C(a, b, -np.conj(b), np.conj(a)) for a, b in zip(al, be)]
    D = np.array([wigner_d_matrix(1, k) for k in ks])
    gram = np.einsum("n,nij,nkl->ijkl", grid.weights, D, D.conj())
    want = np.einsum("ik,jl->ijkl", np.eye(3), np.eye(3)) / 3
    assert np.max(np.abs(gram - want)) < 1e-12


def test_jacobi_examples():
    x = np.linspace(-1, 1, 7)
    assert np.all(jacobi_poly(0, 0, 6, x) == 1)
    assert np.allclose(jacobi_poly(1, 0, 2, x), 2 * x - 1)
    assert jacobi_poly(2, 0, 0, 1.0) == pytest.approx(1)


@pytest.mark.parametrize("n, a, b", [(5, 0, 4), (9, 2, 3), (12, 0, 0), (7, 5, 1)])
def test_jacobi_recurrence_vs_series(n, a, b):
    for x in (-0.9, -0.3, 0.0, 0.41, 0.88):
        assert jacobi_poly(n, a, b, x) == pytest.approx(jacobi_series(n, a, b, Fraction(x).limit_denominator(10 ** 9)),
                                                      rel=1e-10, abs=1e-12)


def test_half_integer_indices():
    assert check_indices(1.5, 0.5, -1.5) == (3, 1, -3)
    with pytest.raises(ValueError):
        check_indices(1, 0.5)
    with pytest.raises(ValueError):
        check_indices(1, 2)


def test_phi_examples():
    k = random_k(np.random.default_rng(9))
    a, b = k.a, k.b
    for ell in (0.5, 1, 2.5, 7):
        assert wigner_phi(ell, ell, ell, k) == pytest.approx(np.conj(a) ** round(2 * ell), rel=1e-12)
    ident = Mat2C.identity()
    for p in (-2, 0, 1):
        for q in (-2, 0, 1):
            assert wigner_phi(2, p, q, ident) == pytest.approx(float(p == q))
    # the defining action on l = 1/2: rows p = 1/2, -1/2; columns q = 1/2, -1/2
    want = [[np.conj(a), -np.conj(b)], [b, a]]
    got = [[wigner_phi(0.5, p, q, k) for q in (0.5, -0.5)] for p in (0.5, -0.5)]
    assert np.allclose(got, want, atol=1e-14)


@given(seeds, st.integers(1, 8))
def test_phi_closed_form_vs_sum(seed, l2):
    k = random_k(np.random.default_rng(seed))
    ell = l2 / 2
    idx = [(l2 - 2 * j) / 2 for j in range(l2 + 1)]
    for p in idx:
        for q in idx:
            ref = wigner_phi_sum(ell, p, q, k, dps=30)
            assert wigner_phi(ell, p, q, k) == pytest.approx(ref, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("ell", [1, 5.5, 20, 60])
def test_wigner_d_unitary(ell):
    k = random_k(np.random.default_rng(int(2 * ell)))
    D = wigner_d_matrix(ell, k)
    assert np.max(np.abs(D @ D.conj().T - np.eye(D.shape[0]))) < 1e-9
    assert np.allclose(wigner_d_matrix(ell, Mat2C.identity()), np.eye(D.shape[0]))
    assert np.all(np.abs(np.diag(D)) <= 1 + 1e-12)


@given(seeds, seeds)
def test_d_is_a_homomorphism(s1, s2):
    k1, k2 = random_k(np.random.default_rng(s1)), random_k(np.random.default_rng(s2))
    D1, D2 = wigner_d_matrix(1.5, k1), wigner_d_matrix(1.5, k2)
    D12 = wigner_d_matrix(1.5, k1 @ k2)
    assert np.allclose(D12, D1 @ D2, atol=1e-12) or np.allclose(D12, D2 @ D1, atol=1e-12)


def test_chi_star_eta_examples():
    k = random_k(np.random.default_rng(4))
    assert chi_star_eta(3, 3, k) == pytest.approx(7 * np.conj(k.a) ** 6)
    assert chi_star_eta(4, 2, Mat2C.identity()) == pytest.approx(9)


@given(seeds, st.integers(1, 30))
def test_chi_star_eta_routes(seed, l2):
    k = random_k(np.random.default_rng(seed))
    ell = l2 / 2
    for p2 in range(-l2, l2 + 1, 2):
        val = chi_star_eta(ell, p2 / 2, k)
        assert val == pytest.approx((l2 + 1) * wigner_phi(ell, p2 / 2, p2 / 2, k), rel=1e-9, abs=1e-10)
        assert val == pytest.approx(chi_star_eta_sum(ell, p2 / 2, k), rel=1e-9, abs=1e-10)


@given(seeds, st.integers(1, 40), st.integers(0, 40))
def test_restriction_identity(seed, ell, q):
    q = min(q, ell)
    rng = np.random.default_rng(seed)
    u, v, w = rng.uniform(-math.pi, math.pi, 3)
    val = restriction_identity(ell, q, u, v, w)
    # with the generating-function convention the identity picks out the (-q, -q) coefficient
    assert val == pytest.approx(wigner_phi(ell, -q, -q, k_from_euler(u, v, w)), abs=1e-9)
    # at u + w = 0 it also equals the (q, q) coefficient
    assert restriction_identity(ell, q, u, v, -u) == pytest.approx(
        wigner_phi(ell, q, q, k_from_euler(u, v, -u)), abs=1e-9)
    assert restriction_identity(ell, q, u, 0.0, w) == pytest.approx(cmath.exp(2j * q * (u + w)))


def test_restriction_profile_figure_shape():
    v = np.linspace(0, math.pi, 601)
    zero = restriction_profile(240, 0, v)
    assert abs(abs(zero[300]) - 1) < 1e-12
    assert np.all(np.abs(zero) <= 1 + 1e-12)
    assert restriction_profile(240, 240, np.array([0.0]))[0] == 1
