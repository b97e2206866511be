import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bigktype.mat2c import Mat2C, cartan, conj_normal_form, random_k, random_sl2
from bigktype.sphtrace import (EnvelopeScan, SpectralParam, averaged_value, default_sampler, envelope_scan,
                               envelope_thm4, envelope_thm5a, envelope_thm5b, envelope_thm6, phi_avg,
                               phi_avg_reduced, phi_avg_top, phi_trace, q_value, reduced_grid)

seeds = st.integers(0, 2 ** 32 - 1)


def a_h(h):
    e = math.exp(h / 2)
    return Mat2C.diag(e, 1 / e)


@pytest.mark.parametrize("h", [0.3, 1.0, 2.5])
@pytest.mark.parametrize("nu", [0.5, 1j, 0.2 + 0.7j])
def test_l_zero_is_the_spherical_function(h, nu):
    # closed form sinh(nu h) / (nu sinh h) for the K-biinvariant case
    want = np.sinh(nu * h) / (nu * math.sinh(h))
    assert phi_trace(SpectralParam(nu, 0, 0), a_h(h)) == pytest.approx(want, rel=1e-11)


def test_l_zero_at_nu_zero():
    assert phi_trace(SpectralParam(0, 0, 0), a_h(2.0)) == pytest.approx(2 / math.sinh(2.0), rel=1e-12)


@pytest.mark.parametrize("ell, p", [(1, 0), (1, 1), (2.5, 0.5), (6, -3)])
def test_value_at_identity(ell, p):
    for nu in (0, 1.3j, 0.4):
        assert phi_trace(SpectralParam(nu, p, ell), Mat2C.identity()) == pytest.approx(2 * ell + 1, rel=1e-10)


def test_vanishing_parameters():
    g = random_sl2(np.random.default_rng(1))
    assert phi_trace(SpectralParam(0, 3, 2), g) == 0
    assert phi_trace(SpectralParam(0, 0.5, 2), g) == 0


@given(seeds, st.integers(0, 6), st.floats(-3, 3))
def test_tempered_bounded_by_dimension(seed, ell, t):
    g = random_sl2(np.random.default_rng(seed), 4.0)
    for p in range(-ell, ell + 1, 2):
        assert abs(phi_trace(SpectralParam(1j * t, p, ell), g)) <= 2 * ell + 1 + 1e-9


@given(seeds)
def test_k_conjugation_and_inverse(seed):
    rng = np.random.default_rng(seed)
    g, k = random_sl2(rng, 3.0), random_k(rng)
    par = SpectralParam(0.3j, 1, 3)
    val = phi_trace(par, g)
    assert phi_trace(par, k @ g @ k.inv()) == pytest.approx(val, rel=1e-9, abs=1e-11)
    # the inverse gives the complex conjugate at tempered nu
    assert phi_trace(par, g.inv()) == pytest.approx(val.conjugate(), rel=1e-9, abs=1e-11)


def test_explicit_grid_agrees_with_aligned_rule():
    g = random_sl2(np.random.default_rng(5), 2.0)
    par = SpectralParam(0.5j, 1, 2)
    on_grid = phi_trace(par, g, grid=reduced_grid(40, 40))
    assert on_grid == pytest.approx(phi_trace(par, g), rel=1e-8)


def test_restriction_to_k():
    # on K the conjugation average leaves the plain trace of tau_l(k), whatever nu and p
    from bigktype.su2rep import character
    k = random_k(np.random.default_rng(3))
    for nu, p in ((0, 2), (2j, 2), (0.5, -4)):
        assert phi_trace(SpectralParam(nu, p, 4), k) == pytest.approx(character(4, k) / 9, rel=1e-10)


@pytest.mark.parametrize("ell", [1, 3, 7])
def test_averaged_at_plus_minus_identity(ell):
    for q in range(-ell, ell + 1):
        for g in (Mat2C.identity(), Mat2C.diag(-1, -1)):
            assert abs(phi_avg_reduced(ell, 0, q, cartan(g)) - 1) < 1e-10
    assert abs(phi_avg(0, 2, 1, Mat2C.identity()) - 1) < 1e-10


@given(seeds)
def test_averaged_routes(seed):
    g = random_sl2(np.random.default_rng(seed), 2.5)
    cf = cartan(g)
    for q in (-2, 0, 1, 2):
        lit = phi_avg(0.4j, 2, q, g)
        assert phi_avg_reduced(2, 0.4j, q, cf) == pytest.approx(lit, abs=1e-8)
    assert phi_avg_top(2, 0.4j, cf) == pytest.approx(phi_avg(0.4j, 2, 2, g), abs=1e-8)


@given(seeds, st.integers(1, 30))
def test_top_average_bounded(seed, ell):
    g = random_sl2(np.random.default_rng(seed), 4.0)
    assert abs(averaged_value(ell, ell, g)) <= 1 + 1e-10
    assert averaged_value(ell, -ell, g) == pytest.approx(phi_avg_reduced(ell, 0, -ell, cartan(g)), abs=1e-8)


def test_envelope_branches():
    nf = conj_normal_form(Mat2C(2, 0, 0, 0.5))
    assert envelope_thm4(100, nf) == pytest.approx(min(100, nf_norm(nf) ** 6 / abs(nf.z ** 2 - 1) ** 2))
    # unipotent: only the u-term and l remain
    nf = conj_normal_form(Mat2C(1, 3, 0, 1))
    assert envelope_thm4(100, nf) == pytest.approx(min(100, 10 * nf_norm(nf) ** 3 / 3))
    assert envelope_thm4(100, conj_normal_form(Mat2C.identity())) == 100
    assert envelope_thm6(50, Mat2C.identity()) == 1.0
    assert envelope_thm5a(50, Mat2C(0, 1, -1, 0)) == 1.0
    assert envelope_thm5b(50, a_h(2.0)) == pytest.approx((2 * math.cosh(2.0)) ** -1)


def nf_norm(nf):
    return math.sqrt(abs(nf.z) ** 2 + abs(nf.u) ** 2 + abs(1 / nf.z) ** 2)


def test_q_values():
    assert [q_value(9, k) for k in ("zero", "half", "top", 4)] == [0, 5, 9, 4]


def test_scan_on_identity():
    scan = envelope_scan([4, 8], "top", [("id", Mat2C.identity())])
    assert isinstance(scan, EnvelopeScan)
    # |phi| = 1 against the envelope ||id||^-2 = 1/2
    assert [r.max_ratio for r in scan.reports] == pytest.approx([2.0, 2.0])
    assert scan.growth_ok


def test_sampler_deterministic():
    a, b = default_sampler(12, seed=3), default_sampler(12, seed=3)
    assert [d for d, _ in a] == [d for d, _ in b]
    assert all(np.array_equal(x.array(), y.array()) for (_, x), (_, y) in zip(a, b))
