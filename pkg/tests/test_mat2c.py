import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bigktype.mat2c import (Mat2C, big_D, cartan, conj_normal_form, dist_to_D, dist_to_K, dist_to_N, dist_to_S,
                            frobenius_norm, iwasawa, parse_matrix, random_k, random_sl2)

seeds = st.integers(0, 2 ** 32 - 1)
DIAG = Mat2C.diag(2, 0.5)
W = Mat2C(0, 1, -1, 0)


def close(x, y, tol=1e-12):
    return np.allclose(Mat2C.of(x).array(), Mat2C.of(y).array(), atol=tol)


@pytest.mark.parametrize("g, val", [(Mat2C.identity(), math.sqrt(2)), (DIAG, math.sqrt(4.25)), (W, math.sqrt(2))])
def test_frobenius_examples(g, val):
    assert frobenius_norm(g) == pytest.approx(val, rel=1e-15)


def test_iwasawa_examples():
    kappa, H = iwasawa(DIAG)
    assert close(kappa, Mat2C.identity())
    assert math.exp(2 * H) == pytest.approx(4)
    kappa, H = iwasawa(Mat2C(1, 0, 1, 1))
    assert kappa.a == pytest.approx(1 / math.sqrt(2)) and kappa.c == pytest.approx(1 / math.sqrt(2))
    assert math.exp(2 * H) == pytest.approx(2)
    k = random_k(np.random.default_rng(3))
    kappa, H = iwasawa(k)
    assert close(kappa, k) and abs(H) < 1e-15


def test_cartan_examples():
    assert cartan(Mat2C.diag(math.e, 1 / math.e)).h == pytest.approx(2)
    assert abs(cartan(random_k(np.random.default_rng(1))).h) < 1e-7
    assert cartan(Mat2C(1, 1, 0, 1)).h == pytest.approx(2 * math.log((1 + math.sqrt(5)) / 2), rel=1e-12)


def test_conj_normal_form_examples():
    nf = conj_normal_form(Mat2C(1, 5, 0, 1))
    assert nf.z == 1 and abs(nf.u) == pytest.approx(5)
    nf = conj_normal_form(Mat2C.diag(3, 1 / 3))
    assert nf.z == pytest.approx(3) and abs(nf.u) < 1e-12
    k = random_k(np.random.default_rng(5))
    nf = conj_normal_form(k @ DIAG @ k.inv())
    assert nf.z == pytest.approx(2, rel=1e-12)


def test_distance_examples():
    k = random_k(np.random.default_rng(0))
    assert dist_to_K(k) < 1e-7
    assert dist_to_K(DIAG) == pytest.approx(math.sqrt(1.25))
    assert dist_to_K(Mat2C(0, 2, -0.5, 0)) == pytest.approx(math.sqrt(1.25))
    th = 0.7
    assert dist_to_S(Mat2C.diag(cmath.exp(1j * th), cmath.exp(-1j * th))) < 1e-7
    assert dist_to_S(W) < 1e-7
    assert dist_to_S(DIAG) == pytest.approx(math.sqrt(1.25))
    assert dist_to_D(Mat2C.diag(2 + 1j, 1 / (2 + 1j))) < 1e-6
    assert dist_to_D(Mat2C(1, 1, 0, 1)) == pytest.approx(1)


def test_dist_to_d_grid_oracle():
    g = Mat2C(2, 0, 0, 1)
    r = np.exp(np.linspace(-1.5, 1.5, 1501))
    th = np.linspace(-math.pi, math.pi, 721)
    z = r[:, None] * np.exp(1j * th[None, :])
    oracle = np.sqrt(np.min(np.abs(2 - z) ** 2 + np.abs(1 - 1 / z) ** 2))
    assert dist_to_D(g) == pytest.approx(oracle, abs=1e-4)
    assert dist_to_D(g) <= oracle + 1e-12


def test_big_d_examples():
    assert big_D(DIAG) == pytest.approx(3.75)
    assert big_D(Mat2C(1, 2, 1, 1)) == pytest.approx(3)
    assert big_D(Mat2C(2 * 1j, 3, -3j, -2)) == 0


def test_dist_to_n_examples():
    assert dist_to_N(W) < 1e-6
    assert dist_to_N(random_k(np.random.default_rng(2))) < 1e-6
    d = dist_to_N(DIAG)
    assert d ** 2 <= big_D(DIAG) + 1e-9
    assert big_D(DIAG) <= 2 * frobenius_norm(DIAG) * d + 1e-9


def test_parse_matrix():
    assert close(parse_matrix("id"), Mat2C.identity())
    assert close(parse_matrix("[[0,1],[-1,0]]"), W)
    assert close(parse_matrix("[[[1,2],0],[0,[0.2,-0.4]]]"), Mat2C(1 + 2j, 0, 0, 0.2 - 0.4j))


@given(seeds)
def test_random_sl2(seed):
    g = random_sl2(np.random.default_rng(seed))
    assert abs(g.det() - 1) < 1e-12
    assert math.sqrt(2) - 1e-12 <= frobenius_norm(g) <= 3 + 1e-12


@given(seeds)
def test_cartan_reconstructs(seed):
    g = random_sl2(np.random.default_rng(seed))
    cf = cartan(g)
    assert close(cf.reconstruct(), g, 1e-10)
    assert frobenius_norm(g) ** 2 == pytest.approx(2 * math.cosh(cf.h), rel=1e-12)


@given(seeds)
def test_conj_normal_form_reconstructs(seed):
    g = random_sl2(np.random.default_rng(seed))
    nf = conj_normal_form(g)
    assert abs(nf.z) >= 1 - 1e-12
    assert close(nf.reconstruct(), g, 1e-9)


@given(seeds)
def test_distance_invariance(seed):
    rng = np.random.default_rng(seed)
    g, k1, k2 = random_sl2(rng), random_k(rng), random_k(rng)
    assert dist_to_K(k1 @ g @ k2) == pytest.approx(dist_to_K(g), abs=1e-9)
    t = Mat2C.diag(cmath.exp(0.3j), cmath.exp(-0.3j))
    # conjugation by the torus fixes D and S
    assert dist_to_D(t @ g @ t.inv()) == pytest.approx(dist_to_D(g), abs=1e-7)
    assert dist_to_S(t @ g @ t.inv()) == pytest.approx(dist_to_S(g), abs=1e-9)
    assert big_D(k1 @ g @ k1.inv()) >= 0


@given(seeds)
def test_distance_ordering(seed):
    # D and S-diagonal both sit inside the closed sets they are compared with
    g = random_sl2(np.random.default_rng(seed))
    assert dist_to_S(g) >= dist_to_K(g) - 1e-9
    assert dist_to_D(g) <= math.hypot(abs(g.b), abs(g.c)) + math.hypot(abs(g.a - 1), abs(g.d - 1)) + 1e-9
    assert dist_to_D(g) >= math.hypot(abs(g.b), abs(g.c)) - 1e-12
