"""tau_l-spherical transform pair on SL2(C) and its numerical checks.

Both directions use the weight decomposition of the K-type block of the
principal series:

    phi^l_{nu,p}(k a_h) = sum_j D^l_{jj}(k) A_j(h),
    A_j(h) = (2l+1) int_0^1 conj(d_jp(v)) d_jp(v') t^(2nu-2) dx,   x = sin^2 v,

where (cos v', sin v') = (e^{h/2} cos v, e^{-h/2} sin v) / t and
t^2 = e^h cos^2 v + e^{-h} sin^2 v.  The torus angles drop out, so every
coefficient is a one-dimensional integral.  A conjugation-invariant f of
K-type l decomposes the same way with radial coefficients F_j(h).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .mat2c import EulerAngles, Mat2C, cartan, k_matrix
from .sphtrace import QuadratureError, _refine, _sigma_rule
from .su2rep import _d_ab, check_indices, doubled, jacobi_poly

T_TAIL = 1e-12


@dataclass(frozen=True)
class SpectralWeight:
    """h(nu, p) on the tempered dual; `decay` is a Gaussian rate a with |h(it, p)| <= C e^{-a t^2}."""

    evaluator: Callable[[complex, float], complex]
    ell: float
    decay: float | None
    ftilde: Callable[[np.ndarray, float], np.ndarray] | None = None
    symmetric: bool = False  # h(nu, p) = h(p, nu) at integer points, so the tail formula applies

    def __call__(self, nu, p) -> complex:
        return self.evaluator(nu, p)


@dataclass(frozen=True)
class GroupFunction:
    """f(k1 a_h k2) with K-type tag l.

    `tail_bound(h)` bounds |f(k1 a_h k2)| and is required by forward_transform;
    `radial(h)` returns the coefficients F_j(h), j = l, l-1, ..., -l, when known.
    """

    evaluator: Callable[[EulerAngles, float, EulerAngles], complex]
    ell: float
    tail_bound: Callable[[float], float] | None = None
    radial: Callable[[float], np.ndarray] | None = None

    def __call__(self, g) -> complex:
        cf = cartan(g)
        return self.evaluator(cf.k1, cf.h, cf.k2)


def _p_values(ell) -> list[float]:
    l2 = doubled(ell)
    return [(l2 - 2 * j) / 2 for j in range(l2 + 1)]


def gaussian_weight(ell) -> SpectralWeight:
    check_indices(ell)
    ell = doubled(ell) / 2
    if ell < 1:
        raise ValueError("l must be >= 1")

    def h(nu, p):
        if abs(p) > ell:
            return 0.0
        return complex(np.exp((p * p - ell * ell + complex(nu) ** 2) / 2))

    return SpectralWeight(h, ell, 0.5, lambda s, p: f_tilde(ell, s, p), symmetric=True)


def f_tilde(ell, s, p):
    """int h(it, p) e^{-its} (t^2 + p^2) dt for the Gaussian weight, in closed form."""
    s = np.asarray(s, dtype=float)
    return math.sqrt(2 * math.pi) * (p * p + 1 - s * s) * np.exp((p * p - ell * ell - s * s) / 2)


def spectral_cutoff(ell) -> float:
    return math.sqrt(2 * 50 * math.log(2 + ell)) + 10


def f_tilde_quadrature(weight: SpectralWeight, s, p, n: int = 400):
    """The Fourier integral over [-T, T] by Gauss-Legendre; oracle for closed forms."""
    T = spectral_cutoff(weight.ell)
    t, wt = np.polynomial.legendre.leggauss(n)
    t, wt = t * T, wt * T
    hv = np.array([weight(1j * ti, p) for ti in t])
    s = np.atleast_1d(np.asarray(s, dtype=float))
    vals = (wt * hv * (t * t + p * p)) @ np.exp(-1j * np.outer(t, s))
    return vals.real if np.all(np.abs(vals.imag) <= 1e-12 * (1 + np.abs(vals.real))) else vals


def _ftilde(weight: SpectralWeight, s, p):
    if weight.ftilde is not None:
        return weight.ftilde(s, p)
    return f_tilde_quadrature(weight, s, p)


# ---- one-dimensional building blocks -----------------------------------------------------


def _sigma_nodes(h: float, n: int):
    """x nodes with dx weights, log t^2, and the angles of v and v'."""
    c = -math.expm1(-2 * h)
    x, w, lg = _sigma_rule(c, n)
    logt2 = h + lg
    cv, sv = np.sqrt(1 - x), np.sqrt(x)
    r = np.exp(-logt2 / 2)
    return x, w, logt2, cv, sv, math.exp(h / 2) * cv * r, math.exp(-h / 2) * sv * r


def _d_products(l2: int, p2: int, cv, sv, cvp, svp) -> np.ndarray:
    """conj(d_jp(v)) d_jp(v') for j = l..-l, rows indexed by j."""
    a0, b0 = cv + 0j, 1j * sv
    a1, b1 = cvp + 0j, 1j * svp
    return np.array([np.conj(_d_ab(l2, j2, p2, a0, b0)) * _d_ab(l2, j2, p2, a1, b1)
                     for j2 in range(l2, -l2 - 1, -2)])


def trace_coefficients(ell, nu, p, h: float, tol: float = 1e-12) -> np.ndarray:
    """A_j(h) for j = l, l-1, ..., -l; zero vector when phi^l_{nu,p} vanishes."""
    l2 = doubled(ell)
    p2 = doubled(p)
    if abs(p2) > l2 or (l2 - p2) % 2:
        return np.zeros(l2 + 1, dtype=complex)
    nu = complex(nu)

    def integral(n):
        x, w, logt2, cv, sv, cvp, svp = _sigma_nodes(h, n)
        G = _d_products(l2, p2, cv, sv, cvp, svp)
        return (l2 + 1) * (G @ (w * np.exp((nu - 1) * logt2)))

    return _refine(integral, l2 + 24 + int(6 * h), tol)[0]


def _profile_extended(l2: int, j2: int, p2: int, s, h: float):
    """conj(d_jp(v)) d_jp(v') as a function of s = log t^2, continued beyond |s| <= h.

    In s the product is N^2 (cos v cos v')^a (sin v sin v')^b P(cos 2v) P(cos 2v'),
    with cos v cos v' = (1-x) e^{(h-s)/2}, sin v sin v' = x e^{-(h+s)/2} and
    x = (1 - e^{s-h}) / (1 - e^{-2h}); these are polynomial in x, e^{s/2}.
    """
    a2, b2 = abs(j2 + p2), abs(j2 - p2)
    a, b = a2 // 2, b2 // 2
    n = (l2 - max(abs(j2), abs(p2))) // 2
    lg = math.lgamma
    norm2 = math.exp(lg(n + 1) + lg(n + a + b + 1) - lg(n + a + 1) - lg(n + b + 1))
    c = -math.expm1(-2 * h)
    x = -np.expm1(s - h) / c
    xp = x * np.exp(-h - s)
    cc = (1 - x) * np.exp((h - s) / 2)
    ss = x * np.exp(-(h + s) / 2)
    P = jacobi_poly(n, b, a, 1 - 2 * x) * jacobi_poly(n, b, a, 1 - 2 * xp)
    return norm2 * cc ** a * ss ** b * P


def _tail_limit(ell: float) -> float:
    # e^{-s^2/2} beats the e^{l |s|} growth of the profile by 1e-30 past this point
    return ell + math.sqrt(ell * ell + 140) + 2


def _radial_direct(weight: SpectralWeight, l2: int, h: float, tol: float) -> np.ndarray:
    def integral(n):
        x, w, logt2, cv, sv, cvp, svp = _sigma_nodes(h, n)
        tot = np.zeros(l2 + 1, dtype=complex)
        for p in _p_values(l2 / 2):
            G = _d_products(l2, doubled(p), cv, sv, cvp, svp)
            tot += G @ (w * np.exp(-logt2) * _ftilde(weight, logt2, p))
        return tot / (2 * math.pi ** 2)

    return _refine(integral, l2 + 32 + int(8 * h), tol)[0]


def _radial_tail(weight: SpectralWeight, l2: int, h: float, tol: float) -> np.ndarray:
    smax = _tail_limit(l2 / 2)
    if h >= smax:
        return np.zeros(l2 + 1, dtype=complex)

    def integral(n):
        t, wt = np.polynomial.legendre.leggauss(n)
        s = h + (t + 1) * (smax - h) / 2
        wt = wt * (smax - h) / 2
        tot = np.zeros(l2 + 1, dtype=complex)
        for p in _p_values(l2 / 2):
            p2 = doubled(p)
            fp, fm = _ftilde(weight, s, p), _ftilde(weight, -s, p)
            for i, j2 in enumerate(range(l2, -l2 - 1, -2)):
                tot[i] += wt @ (_profile_extended(l2, j2, p2, s, h) * fp
                                + _profile_extended(l2, j2, p2, -s, h) * fm)
        return -tot / (4 * math.pi ** 2 * math.sinh(h))

    return _refine(integral, 40 + 2 * l2, tol)[0]


TAIL_SWITCH = 2.0


def radial_coefficients(weight: SpectralWeight, ell, h: float, tol: float = 1e-12,
                        route: str = "auto") -> np.ndarray:
    """F_j(h), j = l..-l, of the inverse transform of `weight`.

    'direct' integrates over |s| <= h; 'tail' uses the vanishing of the
    full-line integral and keeps only |s| > h, which avoids cancellation for
    large h.  'auto' switches at h = 2 when the weight is symmetric.
    """
    if weight.decay is None:
        raise ValueError("spectral weight without a decay certificate")
    l2 = doubled(ell)
    h = abs(h)
    if route == "auto":
        route = "tail" if weight.symmetric and h > TAIL_SWITCH else "direct"
    if route == "tail":
        if not weight.symmetric:
            raise ValueError("the tail formula needs h(nu, p) = h(p, nu)")
        return _radial_tail(weight, l2, h, tol)
    return _radial_direct(weight, l2, h, tol)


def _diag_d(l2: int, k: Mat2C) -> np.ndarray:
    return np.array([_d_ab(l2, j2, j2, k.a, k.b) for j2 in range(l2, -l2 - 1, -2)])


def _k_of(e: EulerAngles) -> Mat2C:
    return k_matrix(e.u, e.v, e.w)


def tail_certificate(ell) -> Callable[[float], float]:
    """h -> sum_p int_h^inf |f_tilde(s, p)| ds, a bound for |f(k1 a_h k2)| when h > 1."""
    ps = _p_values(ell)

    @lru_cache(maxsize=None)
    def bound(h: float) -> float:
        if h <= 1:
            return math.inf
        return sum(quad(lambda s: abs(float(f_tilde(ell, s, p))), h, np.inf)[0] for p in ps)

    return bound


def inverse_function(weight: SpectralWeight, ell) -> GroupFunction:
    """The inverse transform of `weight` as a GroupFunction (radial coefficients cached)."""
    l2 = doubled(ell)

    @lru_cache(maxsize=4096)
    def radial(h: float) -> np.ndarray:
        return radial_coefficients(weight, ell, h)

    def evaluator(k1: EulerAngles, h: float, k2: EulerAngles) -> complex:
        return complex(_diag_d(l2, _k_of(k2) @ _k_of(k1)) @ radial(abs(h)))

    cert = tail_certificate(ell) if weight.symmetric else None
    return GroupFunction(evaluator, l2 / 2, cert, radial)


def inverse_transform(weight: SpectralWeight, ell, g, route: str = "radial", n_t: int = 160) -> complex:
    """f(g) = 1/((2l+1) pi^2) sum_p int_0^inf h(it,p) phi^l_{it,p}(g^-1) (t^2+p^2) dt.

    'radial' evaluates through the weight decomposition; 'spectral' integrates
    the display directly over t in [0, T] with trace functions from sphtrace.
    """
    if weight.decay is None:
        raise ValueError("spectral weight without a decay certificate")
    g = Mat2C.of(g)
    if route == "radial":
        return inverse_function(weight, ell)(g)
    from .sphtrace import SpectralParam, phi_trace

    T = spectral_cutoff(ell)
    t, wt = np.polynomial.legendre.leggauss(n_t)
    t, wt = (t + 1) * T / 2, wt * T / 2
    gi = g.inv()
    tot = 0j
    for p in _p_values(ell):
        for ti, wi in zip(t, wt):
            hv = weight(1j * ti, p)
            if abs(hv) < 1e-300:
                continue
            tot += wi * hv * (ti * ti + p * p) * phi_trace(SpectralParam(1j * ti, p, ell), gi)
    return tot / ((doubled(ell) + 1) * math.pi ** 2)


# ---- measure and forward transform -------------------------------------------------------


def _trace_gg_star(g11, g12, g21, g22):
    return abs(g11) ** 2 + abs(g12) ** 2 + abs(g21) ** 2 + abs(g22) ** 2


def _iwasawa_reference(n: int) -> float:
    """int e^{-tr(g g*)} |dz| dr / r^5 dk over g = n(z) diag(r, 1/r) k."""
    y, wy = np.polynomial.legendre.leggauss(n)
    Y = 8.0
    y, wy = y * Y, wy * Y  # y = log r, dr / r = dy
    q, wq = np.polynomial.legendre.leggauss(n)
    theta = np.linspace(0, 2 * math.pi, 4, endpoint=False)
    tot = 0.0
    for yi, wi in zip(y, wy):
        r = math.exp(yi)
        R = 7 * r
        rho, wr = (q + 1) * R / 2, wq * R / 2
        z = rho[:, None] * np.exp(1j * theta)[None, :]
        # g = [[1, z], [0, 1]] [[r, 0], [0, 1/r]]; right K factor leaves tr(g g*) unchanged
        val = np.exp(-_trace_gg_star(r, z / r, 0.0, 1 / r)).mean(axis=1)
        tot += wi * r ** -4 * (wr * rho) @ val * 2 * math.pi
    return tot


def _cartan_reference(n: int) -> float:
    """int e^{-tr(g g*)} sinh^2(h) dk1 dh dk2 over g = k1 a_h k2."""
    t, wt = np.polynomial.legendre.leggauss(n)
    H = 6.0
    h, wh = (t + 1) * H / 2, wt * H / 2
    rng = np.random.default_rng(0)
    from .mat2c import random_k

    ks = [(random_k(rng), random_k(rng)) for _ in range(3)]
    tot = 0.0
    for hi, wi in zip(h, wh):
        e = math.exp(hi / 2)
        vals = []
        for k1, k2 in ks:
            g = k1 @ Mat2C.diag(e, 1 / e) @ k2
            vals.append(math.exp(-_trace_gg_star(g.a, g.b, g.c, g.d)))
        tot += wi * math.sinh(hi) ** 2 * float(np.mean(vals))
    return tot


@lru_cache(maxsize=None)
def cartan_measure_calibration(n: int = 96) -> float:
    """The constant c with dg = c sinh^2(h) dk1 dh dk2 for the Iwasawa-normalized Haar measure."""
    c1 = _iwasawa_reference(n) / _cartan_reference(n)
    c2 = _iwasawa_reference(2 * n) / _cartan_reference(2 * n)
    if abs(c1 - c2) > 1e-3 * abs(c2):
        raise QuadratureError(f"calibration unstable under refinement: {c1} vs {c2}")
    return c2


def _h_cutoff(f: GroupFunction, ell, sigma: float, c: float) -> float:
    if f.tail_bound is None:
        raise ValueError("forward transform needs a decay certificate on f")
    h = 1.5
    while h < 40:
        grow = math.sinh(sigma * h) / (sigma * math.sinh(h)) if sigma else h / math.sinh(h)
        if c * math.sinh(h) ** 2 * f.tail_bound(h) * (doubled(ell) + 1) * grow < T_TAIL:
            return h
        h += 0.5
    raise QuadratureError("decay certificate too weak to truncate the h-integral")


def _k_projection(f: GroupFunction, l2: int, h: float, n: int) -> np.ndarray:
    """int_K f(k a_h) D_jj(k) dk for j = l..-l on a product Haar grid."""
    from .su2rep import haar_grid

    grid = haar_grid(n, n, n)
    al, be = grid.alpha_beta()
    zero = EulerAngles(0.0, 0.0, 0.0)
    fv = np.array([f.evaluator(EulerAngles(u, v, w), h, zero)
                   for u, v, w in zip(grid.u, grid.v, grid.w)])
    return np.array([grid.weights @ (fv * _d_ab(l2, j2, j2, al, be)) for j2 in range(l2, -l2 - 1, -2)])


def forward_transform(f: GroupFunction, ell, nu, p, tol: float = 1e-10) -> complex:
    """f_hat(nu, p) = int_G f(g) phi^l_{nu,p}(g) dg in Cartan coordinates."""
    l2 = doubled(ell)
    p2 = doubled(p)
    if abs(p2) > l2 or (l2 - p2) % 2:
        return 0j
    c = cartan_measure_calibration()
    nu = complex(nu)
    hmax = _h_cutoff(f, ell, abs(nu.real), c)

    def radial_pair(hv):
        A = trace_coefficients(ell, nu, p, hv)
        if f.radial is not None:
            # int_K D_jj D_j'j' dk = delta_{j,-j'} / (2l+1)
            return f.radial(hv) @ A[::-1] / (l2 + 1)
        return _k_projection(f, l2, hv, l2 + 4) @ A

    def integral(n):
        t, wt = np.polynomial.legendre.leggauss(n)
        h = (t + 1) * hmax / 2
        wt = wt * hmax / 2
        return c * sum(wi * math.sinh(hi) ** 2 * radial_pair(float(hi)) for hi, wi in zip(h, wt))

    return complex(_refine(integral, 48, tol, max_doublings=4)[0])


def plancherel_check(ell, tol: float = 1e-10) -> tuple[float, float]:
    """(int_G |f|^2 dg, spectral side) for f the inverse transform of the Gaussian weight."""
    weight = gaussian_weight(ell)
    f = inverse_function(weight, ell)
    l2 = doubled(ell)
    c = cartan_measure_calibration()
    hmax = _h_cutoff(f, ell, 0.0, c)

    def integral(n):
        t, wt = np.polynomial.legendre.leggauss(n)
        h = (t + 1) * hmax / 2
        wt = wt * hmax / 2
        return c * sum(wi * math.sinh(hi) ** 2 * float(np.sum(np.abs(f.radial(float(hi))) ** 2))
                       for hi, wi in zip(h, wt)) / (l2 + 1)

    lhs = float(_refine(integral, 48, tol, max_doublings=4)[0])
    rhs = sum(quad(lambda t: abs(weight(1j * t, p)) ** 2 * (t * t + p * p), 0, np.inf)[0]
              for p in _p_values(ell)) / ((l2 + 1) * math.pi ** 2)
    return lhs, rhs


def schwartz_decay_check(f: GroupFunction, orders: int = 2, A: float = 5.0, h_max: float = 8.0,
                         step: float = 1e-3, k1: EulerAngles | None = None,
                         k2: EulerAngles | None = None) -> bool:
    """Central-difference h-derivatives up to `orders` stay under C e^{-A h}.

    C is fitted on h <= 3/4 h_max and the bound must then hold on the rest
    of [0, h_max]; a function decaying no faster than e^{-A h} fails.
    """
    k1 = k1 or EulerAngles(0.0, 0.0, 0.0)
    k2 = k2 or EulerAngles(0.0, 0.0, 0.0)
    hs = np.linspace(0.25, h_max, 32)

    def fv(h):
        return f.evaluator(k1, h, k2)

    split = 0.75 * h_max
    for m in range(orders + 1):
        vals = []
        for h in hs:
            if m == 0:
                d = fv(h)
            elif m == 1:
                d = (fv(h + step) - fv(h - step)) / (2 * step)
            else:
                d = (fv(h + step) - 2 * fv(h) + fv(h - step)) / step ** 2
            vals.append(abs(d) * math.exp(A * h))
        vals = np.array(vals)
        C = vals[hs <= split].max()
        if np.any(vals[hs > split] > C):
            return False
    return True
