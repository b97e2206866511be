import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bigktype.mat2c import Mat2C, random_sl2
from bigktype.sphtransform import (GroupFunction, _cartan_reference, _iwasawa_reference, cartan_measure_calibration,
                                   f_tilde, f_tilde_quadrature, forward_transform, gaussian_weight, inverse_function,
                                   inverse_transform, plancherel_check, radial_coefficients, schwartz_decay_check,
                                   tail_certificate)


@pytest.fixture(scope="module")
def weight1():
    return gaussian_weight(1)


def test_gaussian_weight_values(weight1):
    assert weight1(0, 1) == pytest.approx(1.0)
    assert weight1(0, 0) == pytest.approx(math.exp(-0.5))
    assert weight1(2j, 1) == pytest.approx(math.exp(-2))
    assert weight1(0.3j, 2) == 0
    with pytest.raises(ValueError):
        gaussian_weight(0)


@pytest.mark.parametrize("ell", [1, 1.5, 3])
def test_f_tilde_closed_form_vs_quadrature(ell):
    w = gaussian_weight(ell)
    s = np.linspace(-4, 4, 17)
    p = ell - 1
    assert np.allclose(f_tilde(ell, s, p), f_tilde_quadrature(w, s, p), atol=1e-12)
    assert np.allclose(f_tilde(ell, s, p), f_tilde(ell, -s, p))


def test_value_at_identity(weight1):
    # f(id) = pi^-2 sum_p e^{(p^2-1)/2} int_0^inf e^{-t^2/2} (t^2+p^2) dt
    want = sum(math.exp((p * p - 1) / 2) * math.sqrt(math.pi / 2) * (1 + p * p) for p in (-1, 0, 1)) / math.pi ** 2
    assert inverse_transform(weight1, 1, Mat2C.identity()) == pytest.approx(want, rel=1e-12)


def test_radial_route_vs_spectral_route(weight1):
    g = random_sl2(np.random.default_rng(2), 2.0)
    assert inverse_transform(weight1, 1, g) == pytest.approx(inverse_transform(weight1, 1, g, route="spectral"),
                                                            rel=1e-9, abs=1e-12)


@given(st.integers(0, 2 ** 32 - 1))
def test_inverse_is_conjugation_invariant(seed):
    from bigktype.mat2c import random_k
    rng = np.random.default_rng(seed)
    g, k = random_sl2(rng, 3.0), random_k(rng)
    f = inverse_function(gaussian_weight(1), 1)
    assert f(k @ g @ k.inv()) == pytest.approx(f(g), rel=1e-9, abs=1e-12)


def test_radial_coefficients_shape(weight1):
    assert radial_coefficients(weight1, 1, 0.7).shape == (3,)


def test_forward_outside_k_type(weight1):
    f = inverse_function(weight1, 1)
    assert forward_transform(f, 1, 0.5j, 2) == 0
    assert forward_transform(f, 1, 0.5j, 0.5) == 0


def test_forward_recovers_weight(weight1):
    f = inverse_function(weight1, 1)
    assert forward_transform(f, 1, 0.5j, 1) == pytest.approx(weight1(0.5j, 1), rel=1e-9)


def test_forward_symmetry_at_integer_points(weight1):
    # the transform is symmetric under (nu, p) <-> (p, nu) at integer points
    f = inverse_function(weight1, 1)
    assert forward_transform(f, 1, 1, 0) == pytest.approx(forward_transform(f, 1, 0, 1), rel=1e-9)


@pytest.mark.parametrize("ell", [1, 2])
def test_plancherel(ell):
    lhs, rhs = plancherel_check(ell)
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_calibration_stable():
    c = cartan_measure_calibration()
    assert c > 0
    assert _iwasawa_reference(192) / _cartan_reference(192) == pytest.approx(c, rel=1e-6)


def test_tail_certificate_bounds_values(weight1):
    f = inverse_function(weight1, 1)
    cert = tail_certificate(1)
    assert cert(0.5) == math.inf
    for h in (1.5, 2.5, 4.0):
        e = math.exp(h / 2)
        assert abs(f(Mat2C.diag(e, 1 / e))) <= cert(h)


def test_schwartz_check(weight1):
    assert schwartz_decay_check(inverse_function(weight1, 1))
    slow = GroupFunction(lambda k1, h, k2: math.exp(-h), 1)
    assert not schwartz_decay_check(slow)
