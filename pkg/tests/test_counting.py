import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bigktype.counting import (CountSpec, Predicate, Regime, ResourceGuardExceeded, count, count_gamma_n, count_grid,
                               enumerate_gamma_n, enumerate_gamma_n_bruteforce, hecke_coset_reps,
                               hecke_product_orbits, hecke_support, orbit_canonical, straightforward_fit)
from bigktype.gaussint import GaussInt, norm
from bigktype.mat2c import Mat2C, big_D, dist_to_D, dist_to_K, dist_to_S, frobenius_norm, random_sl2

G0 = random_sl2(np.random.default_rng(0), 2.0)


def as_mat(gam):
    (a, b), (c, d) = gam
    return Mat2C(complex(a), complex(b), complex(c), complex(d))


def test_enumerate_unit_ball():
    found = enumerate_gamma_n(1, math.sqrt(2))
    assert len(found) == 8
    diag = [m for m in found if not m[0][1] and not m[1][0]]
    assert len(diag) == 4
    assert enumerate_gamma_n(1, 1.4) == []
    with pytest.raises(ValueError):
        enumerate_gamma_n(0, 2.0)


@pytest.mark.parametrize("n, R", [(1 + 1j, 1.8), (2, 1.6), (1, 2.2)])
def test_enumerate_matches_brute_force(n, R):
    fast = sorted(enumerate_gamma_n(n, R, G0))
    assert fast == enumerate_gamma_n_bruteforce(n, R, G0)
    assert fast == enumerate_gamma_n_bruteforce(n, R, G0, order="bca")
    for gam in fast:
        (a, b), (c, d) = gam
        assert a * d - b * c == GaussInt.of(n)


def test_count_gamma_n_interval():
    lo, hi = count_gamma_n(1 + 1j, 2.5)
    # the enumeration keeps guard-band ties, so it is the upper end
    assert lo <= hi == len(enumerate_gamma_n(1 + 1j, 2.5))


def test_hecke_cosets():
    assert len(hecke_coset_reps(1 + 1j)) == 3
    assert len(hecke_coset_reps(1)) == 1
    assert len(hecke_coset_reps(3)) == norm(GaussInt(3)) + 1
    # distinct cosets have distinct orbit representatives
    reps = hecke_coset_reps(2)
    assert len({orbit_canonical(r) for r in reps}) == len(reps)


@pytest.mark.parametrize("m, n", [(1 + 1j, 1 - 1j), (3, 1 + 2j), (2, 1 + 1j)])
def test_hecke_multiplication(m, n):
    lhs, rhs = hecke_product_orbits(m, n)
    assert lhs == rhs
    assert sum(lhs.values()) == len(hecke_coset_reps(m)) * len(hecke_coset_reps(n))


def test_orbit_canonical_is_left_invariant():
    gam = ((GaussInt(2, 1), GaussInt(1)), (GaussInt(0), GaussInt(1, -1)))
    left = ((GaussInt(1), GaussInt(1, 1)), (GaussInt(0), GaussInt(1)))
    (a, b), (c, d) = left
    (e, f), (g, h) = gam
    prod = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
    assert orbit_canonical(prod) == orbit_canonical(gam)


def test_identity_unit_regime():
    r = count(CountSpec(Mat2C.identity(), 1, Regime.UNIT, Predicate.THM1_M, 0.1, 0.1))
    assert (r.count, r.upper, r.folded) == (2, 2, 1)
    assert r.count == sum(r.per_n.values())


def test_raw_thm1_counts_even():
    for L, regime in ((1, Regime.UNIT), (7, Regime.MID)):
        r = count(CountSpec(G0, L, regime, Predicate.THM1_M, 0.5, 0.5))
        assert r.count % 2 == 0
        assert r.identity_failures == 0
        assert r.parabolic + r.nonparabolic == r.count


@settings(max_examples=15)
@given(st.floats(0.01, 0.4), st.floats(0.01, 0.4))
def test_m_k_monotone(d1, d2):
    lo, hi = sorted((d1, d2))
    spec = CountSpec(G0, 7, Regime.MID, Predicate.M_K, lo, lo)
    small, big = count_grid(spec, [(lo, lo), (hi, hi)])
    assert small.count <= big.count
    assert small.upper <= big.upper


def test_q_pairs_symmetric():
    g = Mat2C.diag(1.3, 1 / 1.3)
    a = count(CountSpec(g, 3, Regime.UNIT, Predicate.Q_PAIRS, H1=8, H2=14))
    b = count(CountSpec(g, 3, Regime.UNIT, Predicate.Q_PAIRS, H1=14, H2=8))
    assert a.count > 0
    assert (a.count, a.upper, a.per_n) == (b.count, b.upper, b.per_n)


def _reference(pred_fn, L, regime, R):
    tot = 0
    for n in hecke_support(L, regime):
        s = cmath.sqrt(complex(n))
        for gam in enumerate_gamma_n(n, R, G0):
            tot += bool(pred_fn((G0.inv() @ as_mat(gam) @ G0) * (1 / s)))
    return tot


@pytest.mark.parametrize("d", [0.1, 0.3])
def test_predicates_against_matrix_distances(d):
    R = math.sqrt(2) + d + 1e-6
    spec = CountSpec(G0, 7, Regime.MID, Predicate.M_K, d, d)
    assert count(spec).count == _reference(lambda m: dist_to_K(m) <= d, 7, Regime.MID, R)
    spec = CountSpec(G0, 7, Regime.MID, Predicate.M_STAR, d, d)
    assert count(spec).count == _reference(lambda m: dist_to_K(m) <= d and dist_to_D(m) <= d, 7, Regime.MID, R)
    thr = 10 * math.log(1e6) / 1e3
    spec = CountSpec(G0, 7, Regime.MID, Predicate.M_STAR_0, d, d)
    want = _reference(lambda m: dist_to_S(m) <= d and big_D(m) / frobenius_norm(m) ** 2 <= thr, 7, Regime.MID, R)
    assert count(spec).count == want
    spec = CountSpec(G0, 1, Regime.UNIT, Predicate.M_D, d, d)
    assert count(spec).count == _reference(lambda m: dist_to_D(m) <= d and frobenius_norm(m) <= 3, 1, Regime.UNIT, 3)


def test_hecke_support_window():
    for regime, e in ((Regime.MID, 2), (Regime.HIGH, 4)):
        ns = hecke_support(10, regime)
        assert ns
        assert all(10 ** e <= norm(n) <= 16 * 10 ** e for n in ns)
    assert hecke_support(10, Regime.UNIT) == [GaussInt(1)]


def test_spec_guards():
    with pytest.raises(ValueError):
        CountSpec(G0, 5, Regime.MID, Predicate.M_K)
    with pytest.raises(ValueError):
        CountSpec(G0, 7, Regime.MID, Predicate.M_K, delta1=0)
    with pytest.raises(ValueError):
        CountSpec(Mat2C.diag(2, 2), 1, Regime.UNIT, Predicate.M_K)
    with pytest.raises(ResourceGuardExceeded):
        count(CountSpec(G0, 41, Regime.MID, Predicate.M_K))


def test_straightforward_fit_shape():
    fit = straightforward_fit(Mat2C.identity(), [2.0, 3.0], [1, 2])
    assert set(fit) == {"const", "exp_R", "exp_n", "samples"}
    assert len(fit["samples"]) == 4
