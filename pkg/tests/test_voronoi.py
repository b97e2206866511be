import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bigktype.voronoi import (SpectralPair, bump_weight, dedekind_zeta_gauss, dedekind_zeta_line, first_term_contour,
                              first_term_lattice, gamma_factor, hurwitz_zeta, log_gamma_c, log_gamma_ratio, r2,
                              rightmost_pole, voronoi_kernel)

pair = SpectralPair(0.3j, 0.5j, 1, 0)


def test_gamma_c_at_one():
    assert np.exp(log_gamma_c(1.0)) == pytest.approx(1 / math.pi, rel=1e-15)
    assert np.exp(log_gamma_c(3.0)) == pytest.approx(2 * 2 / (2 * math.pi) ** 3, rel=1e-14)


def test_gamma_factor_trivial_pair():
    assert gamma_factor(1, SpectralPair(0, 0, 0, 0)) == pytest.approx(-4 * math.log(math.pi))


def test_gamma_factor_rejects_poles():
    with pytest.raises(ValueError):
        gamma_factor(0, SpectralPair(0, 0, 0, 0))
    with pytest.raises(ValueError):
        gamma_factor(-1, SpectralPair(1, 0, 1, 0))


@given(st.floats(0.3, 3), st.floats(-30, 30), st.integers(0, 3), st.integers(0, 3))
def test_gamma_factor_negation(sigma, t, p1, p2):
    pr = SpectralPair(0.4j, 1.1j, p1, p2)
    s = complex(sigma, t)
    base = gamma_factor(s, pr)
    for j in (1, 2):
        assert gamma_factor(s, pr.negated(j)) == pytest.approx(base, abs=1e-10)


def test_gamma_ratio_swap_at_integer_points():
    pr = SpectralPair(2, 1.5j, 0, 1)
    s = np.array([0.6 + 3j, 1.1 - 7j])
    assert np.allclose(np.exp(log_gamma_ratio(s, pr)), np.exp(log_gamma_ratio(s, pr.swapped(1))), rtol=1e-10)
    with pytest.raises(ValueError):
        pair.swapped(1)


def test_rightmost_pole():
    assert rightmost_pole(SpectralPair(3, 3, 0, 0)) <= 0
    assert rightmost_pole(pair) == pytest.approx(-0.5)


def test_bump_normalized_and_supported():
    w = bump_weight()
    assert w.mellin(1) == pytest.approx(1, abs=1e-13)
    x = np.array([0.5, 1.0, 2.0, 2.5])
    assert np.all(w(x) == 0)
    assert w(1.5) > 0


@pytest.mark.parametrize("s", [2 + 5j, -1.5 + 12j, 0.3 - 40j])
def test_bump_mellin_by_parts(s):
    w = bump_weight()
    val = w.mellin(s)
    assert w.mellin_by_parts(s) == pytest.approx(val, rel=1e-7)
    assert abs(val) <= w.by_parts_bound(s)


def test_mellin_line_matches_quadrature():
    w = bump_weight()
    T, vals = w.mellin_line(0.3, 0.5, 1 << 14)
    for k in (len(T) // 2, len(T) // 2 + 7, len(T) // 2 - 40):
        assert vals[k] == pytest.approx(w.mellin(0.3 + 1j * T[k]), abs=1e-10)


@pytest.mark.parametrize("s", [2.5, 1.3 + 20j, 0.6 - 3j, 3 + 200j])
def test_zeta_against_mpmath(s):
    for a in (1.0, 0.25, 0.75):
        assert complex(hurwitz_zeta(s, a)) == pytest.approx(complex(mpmath.zeta(s, a)), rel=1e-12)
    want = complex(mpmath.zeta(s) * mpmath.dirichlet(s, [0, 1, 0, -1]))
    assert complex(dedekind_zeta_gauss(s)) == pytest.approx(want, rel=1e-12)


def test_zeta_line_matches_pointwise():
    line = dedekind_zeta_line(1.2, 5.0, 0.7, 40, blocks=5)
    s = 1.2 + 1j * (5.0 + 0.7 * np.arange(40))
    assert np.allclose(line, dedekind_zeta_gauss(s), rtol=1e-12)


def test_r2_examples():
    assert [r2(m) for m in (0, 1, 2, 3, 4, 5, 25)] == [1, 4, 4, 0, 4, 8, 12]


@given(st.integers(1, 400))
def test_r2_brute_force(m):
    r = math.isqrt(m)
    assert r2(m) == sum(1 for a in range(-r, r + 1) for b in range(-r, r + 1) if a * a + b * b == m)


@pytest.mark.parametrize("x", [1.2, 0.6])
def test_first_term_routes(x):
    assert first_term_lattice(x) > 0
    assert first_term_contour(x, 0.75) == pytest.approx(first_term_lattice(x), abs=1e-10)


def test_kernel_contour_independent():
    a = voronoi_kernel(0.7, pair)
    assert voronoi_kernel(0.7, pair, contour=0.35) == pytest.approx(a, abs=1e-9)


def test_kernel_argument_checks():
    with pytest.raises(ValueError):
        voronoi_kernel(0, pair)
    with pytest.raises(ValueError):
        voronoi_kernel(1, pair, P=0.5)
    with pytest.raises(ValueError):
        voronoi_kernel(1, pair, contour=-0.6)
