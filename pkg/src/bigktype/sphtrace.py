"""Spherical trace functions on SL2(C), their torus averages, and decay envelopes."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .mat2c import (CartanForm, ConjNormalForm, Mat2C, big_D, cartan, conj_normal_form,
                    dist_to_D, dist_to_K, dist_to_S, frobenius_norm)
from .su2rep import HaarGrid, _sin2v_rule, check_indices, doubled


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectralParam:
    nu: complex
    p: float
    ell: float

    def doubled(self) -> tuple[int, int] | None:
        """(2l, 2p), or None when the trace function vanishes identically."""
        l2, p2 = doubled(self.ell), doubled(self.p)
        if abs(p2) > l2 or (l2 - p2) % 2:
            return None
        return l2, p2


def reduced_grid(n_u: int, n_v: int) -> HaarGrid:
    """Haar rule on (u, v) with w = 0, for integrands invariant under k -> k diag(e^{is}, e^{-is})."""
    u = np.arange(n_u) * (math.pi / n_u)
    v, wv = _sin2v_rule(n_v)
    U, V = np.meshgrid(u, v, indexing="ij")
    wts = np.broadcast_to(wv[None, :], U.shape) / n_u
    return HaarGrid(U.ravel(), V.ravel(), np.zeros(U.size), np.ascontiguousarray(wts).ravel())


def _aligned_arrays(l2: int, h: float, n_x: int):
    """Nodes (alpha, beta, weight) for the trace integral of g = k0 a_h.

    With g in this form t^2 = e^h (1 - c x), x = sin^2 v, c = 1 - e^{-2h}, so
    the u-dependence is a trigonometric polynomial of degree <= 2l in e^{2iu}
    and 2l + 4 uniform u-nodes integrate it exactly; x gets the sigma rule.
    """
    n_u = 2 * l2 + 4
    u = np.arange(n_u) * (math.pi / n_u)
    x, wx, _ = _sigma_rule(-math.expm1(-2 * h), n_x)
    cv, sv = np.sqrt(1 - x), np.sqrt(x)
    eu = np.exp(1j * u)[:, None]
    alpha = (eu * cv[None, :]).ravel()
    beta = (1j * eu * sv[None, :]).ravel()
    wts = np.broadcast_to(wx[None, :] / n_u, (n_u, n_x)).ravel()
    return alpha, beta, np.ascontiguousarray(wts)


def _aligned_form(g: Mat2C) -> tuple[tuple, float]:
    """A K-conjugate of g written as k0 a_h, as an entry tuple, plus h."""
    cf = cartan(g)
    k1, a, k2 = cf.matrices()
    gc = (k2 @ k1) @ a
    return (gc.a, gc.b, gc.c, gc.d), cf.h


def _trace_aligned(gt, h, l2, p2, nu, n_x):
    return _kernels.trace_sum(gt, l2, p2, nu, *_aligned_arrays(l2, h, n_x))


def phi_trace(param: SpectralParam, g, grid: HaarGrid | None = None, check: bool = False) -> complex:
    """Harish-Chandra K-integral of (chi_l * eta_p)(kappa(k^-1 g k)) exp((nu-1) rho H(g k)).

    With an explicit grid the integrand is summed on it as given; otherwise
    g is first conjugated into k0 a_h form and the aligned rule is refined
    until two levels agree to 1e-12 relative.
    """
    val, err = phi_trace_estimate(param, g, grid)
    if check and err > 1e-4 * max(1.0, abs(val)):
        raise QuadratureError(f"trace quadrature unresolved: refinement changed value by {err:.3g}")
    return val


def phi_trace_estimate(param: SpectralParam, g, grid: HaarGrid | None = None,
                       tol: float = 1e-12) -> tuple[complex, float]:
    g = Mat2C.of(g)
    d = param.doubled()
    if d is None:
        return 0j, 0.0
    l2, p2 = d
    nu = complex(param.nu)
    if grid is not None:
        alpha, beta = grid.alpha_beta()
        val = _kernels.trace_sum((g.a, g.b, g.c, g.d), l2, p2, nu, alpha, beta, grid.weights)
        return val, float("nan")
    gt, h = _aligned_form(g)
    return _refine(lambda n: _trace_aligned(gt, h, l2, p2, nu, n), _x_nodes(l2, h, nu), tol)


def _x_nodes(l2: int, h: float, nu: complex) -> int:
    return int(l2 + 16 + 2 * abs(nu) + 4 * h * (1 + l2 ** 0.5))


def _torus(rho: float) -> Mat2C:
    return Mat2C.diag(cmath.exp(1j * rho), cmath.exp(-1j * rho))


def phi_avg(nu: complex, ell, q, g, tol: float = 1e-12) -> complex:
    """Torus average of the p = l trace function against e^{-2iq rho}, 4l+4 uniform rho nodes."""
    return phi_avg_estimate(nu, ell, q, g, tol)[0]


def phi_avg_estimate(nu: complex, ell, q, g, tol: float = 1e-12) -> tuple[complex, float]:
    l2, q2 = check_indices(ell, q)
    g = Mat2C.of(g)
    nu = complex(nu)
    n_rho = 2 * l2 + 4
    tot, err = 0j, 0.0
    for j in range(n_rho):
        rho = 2 * math.pi * j / n_rho
        val, e = phi_trace_estimate(SpectralParam(nu, ell, ell), g @ _torus(rho), tol=tol)
        tot += val * cmath.exp(-1j * q2 * rho)
        err += e
    return tot / n_rho, err / n_rho


# ---- reduced routes on Cartan coordinates ------------------------------------------------


def _sigma_rule(c: float, n: int):
    """Nodes x in [0, 1] and weights for integrals against (1 - c x)^(-s) with c = 1 - r^-4.

    Uses 1 - c x = e^{-sigma}, which flattens the endpoint growth at x = 1 for large r.
    Returns (x, dx-weights, log(1 - c x)).
    """
    t, wt = np.polynomial.legendre.leggauss(n)
    if c < 1e-8:
        x = (t + 1) / 2
        return x, wt / 2, np.log1p(-c * x)
    S = -math.log1p(-c)
    s = (t + 1) * S / 2
    x = -np.expm1(-s) / c
    w = wt * S / 2 * np.exp(-s) / c
    return x, w, -s


def _refine(fn, n0: int, tol: float, max_doublings: int = 6, floor: float = 1e-9):
    # A change that stops shrinking while already below `floor` is rounding noise: accept it.
    prev = fn(n0)
    n = n0
    last = math.inf
    for _ in range(max_doublings):
        n = int(n * 1.6)
        cur = fn(n)
        err = float(np.max(np.abs(cur - prev)))
        scale = max(1.0, float(np.max(np.abs(cur))))
        if err <= tol * scale or (err <= floor * scale and err > 0.25 * last):
            return cur, err
        prev, last = cur, err
    raise QuadratureError(f"no convergence after refinement, last change {err:.3g}")


def _cartan_parts(cf: CartanForm):
    r = math.exp(cf.h / 2)
    return r, cf.k1.u, cf.k1.v, cf.k1.w, cf.k2.u, cf.k2.v, cf.k2.w


def phi_avg_reduced(ell, nu: complex, q, cf: CartanForm, tol: float = 1e-11) -> complex:
    """(u, v) double integral of the expanded torus average; u-rule exact, v-rule refined."""
    return phi_avg_reduced_estimate(ell, nu, q, cf, tol)[0]


def phi_avg_reduced_estimate(ell, nu, q, cf: CartanForm, tol: float = 1e-11) -> tuple[complex, float]:
    l2, q2 = check_indices(ell, q)
    if l2 % 2:
        raise ValueError("the reduced route is implemented for integer l")
    L, Q = l2 // 2, q2 // 2
    nu = complex(nu)
    r, u1, v1, w1, u2, v2, w2 = _cartan_parts(cf)
    n_u = 4 * L + 8
    u = np.arange(n_u) * (math.pi / n_u)
    e2u = np.exp(2j * u)[:, None]
    c = 1 - r ** -4
    cv1, sv1, cv2, sv2 = math.cos(v1), math.sin(v1), math.cos(v2), math.sin(v2)
    ew1, eu2 = cmath.exp(1j * w1), cmath.exp(1j * u2)
    logbin = math.lgamma(2 * L + 1) - math.lgamma(L + Q + 1) - math.lgamma(L - Q + 1)

    def integral(n):
        x, wx, log1mcx = _sigma_rule(c, n)
        sv, cv = np.sqrt(x)[None, :], np.sqrt(1 - x)[None, :]
        A = np.conj(ew1) / e2u * sv / r  # r^-1 e^{-2iu - i w1} sin v
        B = r * ew1 * cv
        C = e2u * np.conj(eu2) * sv  # e^{2iu - i u2} sin v
        D = eu2 * cv
        I = (A * cv1 + B * sv1) * (C * cv2 - D * sv2)
        J = (-A * sv1 + B * cv1) * (C * sv2 + D * cv2)
        f = np.conj(I) ** (L + Q) * np.conj(J) ** (L - Q)
        # h(r, v) = r^2 (1 - c x); the binomial is folded into the log weight
        logw = (nu - 1 - L) * (2 * math.log(r) + log1mcx) + logbin
        inner = f.mean(axis=0) * math.pi  # u-integral over [0, pi)
        return complex(np.sum(wx * np.exp(logw) * inner))

    val, err = _refine(integral, 2 * L + 16, tol)
    pref = (2 * L + 1) * cmath.exp(2j * Q * (u1 + w2)) / math.pi
    return pref * val, abs(pref) * err


def phi_avg_top(ell, nu: complex, cf: CartanForm, tol: float = 1e-12) -> complex:
    return phi_avg_top_estimate(ell, nu, cf, tol)[0]


def phi_avg_top_estimate(ell, nu, cf: CartanForm, tol: float = 1e-12) -> tuple[complex, float]:
    """q = l: x-integral of the phi-average of (U e^{i phi} + V)^{2l} (U e^{-i phi} + V)^{2l}."""
    l2 = doubled(ell)
    if l2 % 2:
        raise ValueError("the top route is implemented for integer l")
    L = l2 // 2
    nu = complex(nu)
    r, u1, v1, w1, u2, v2, w2 = _cartan_parts(cf)
    n_phi = 4 * L + 8
    ph = (2 * math.pi / n_phi) * np.arange(n_phi)[:, None]
    c = 1 - r ** -4
    cc = math.cos(v1) * math.cos(v2)
    ss = math.sin(v1) * math.sin(v2)
    eph = cmath.exp(1j * (u2 + w1)) / r

    def integral(n):
        x, wx, log1mcx = _sigma_rule(c, n)
        U = eph * np.sqrt(x * cc + 0j)[None, :]
        V = 1j * np.sqrt((1 - x) * ss + 0j)[None, :]
        prod = (U * np.exp(1j * ph) + V) * (U * np.exp(-1j * ph) + V)
        inner = (prod ** (2 * L)).mean(axis=0)
        return complex(np.sum(wx * np.exp(-(L + 1 - nu) * log1mcx) * inner))

    val, err = _refine(integral, 2 * L + 16, tol)
    pref = (2 * L + 1) * cmath.exp(2j * L * (u1 - u2 - w1 + w2)) * r ** (2 * nu - 2)
    return pref * val, abs(pref) * err


# ---- decay envelopes ---------------------------------------------------------------------


def _upper_norm(nf: ConjNormalForm) -> float:
    return math.sqrt(abs(nf.z) ** 2 + abs(nf.u) ** 2 + abs(1 / nf.z) ** 2)


def envelope_thm4(ell, nf: ConjNormalForm, eps: float = 0.0) -> float:
    """min(l, l^eps ||g||^6 / |z^2-1|^2, l^(1/2+eps) ||g||^3 / |u|); vanishing denominators drop their term."""
    n = _upper_norm(nf)
    terms = [float(ell)]
    zz = abs(nf.z * nf.z - 1)
    if zz > 0:
        terms.append(ell ** eps * n ** 6 / zz ** 2)
    if abs(nf.u) > 0:
        terms.append(ell ** (0.5 + eps) * n ** 3 / abs(nf.u))
    return min(terms)


def envelope_thm6(ell, g, eps: float = 0.0) -> float:
    g = Mat2C.of(g)
    den = math.sqrt(ell) * dist_to_K(g) ** 2 * dist_to_D(g)
    return ell ** eps * (1.0 if den == 0 else min(1.0, frobenius_norm(g) / den))


def envelope_thm5a(ell, g, eps: float = 0.0) -> float:
    den = math.sqrt(ell) * dist_to_S(g)
    return ell ** eps * (1.0 if den == 0 else min(1.0, 1 / den))


def envelope_thm5b(ell, g, eps: float = 0.0) -> float:
    return frobenius_norm(g) ** (-2 + eps) * ell ** eps


def thm5a_outside(ell, g, const: float = 10.0) -> bool:
    """True when g lies outside the region D(g) <= const ||g||^2 log(l) / sqrt(l)."""
    return big_D(g) > const * frobenius_norm(g) ** 2 * math.log(ell) / math.sqrt(ell)


def thm5b_outside(ell, g, const: float = 10.0) -> bool:
    """True when dist(g, diagonal) > const ||g|| sqrt(log(l) / l)."""
    return dist_to_D(g) > const * frobenius_norm(g) * math.sqrt(math.log(ell) / ell)


THEOREM_FOR_Q = {"zero": "thm5a", "half": "thm6", "top": "thm5b", "full": "thm4"}


def q_value(ell: int, q) -> int:
    if q == "zero":
        return 0
    if q == "half":
        return -(-ell // 2)
    if q == "top":
        return ell
    return int(q)


def averaged_value(ell: int, q: int, g, nu: complex = 0) -> complex:
    """Cheapest accurate route for the torus average: top route at q = +-l, else the reduced one."""
    g = Mat2C.of(g)
    if q == ell:
        return phi_avg_top(ell, nu, cartan(g))
    if q == -ell:
        return phi_avg_top(ell, -complex(nu).conjugate(), cartan(g)).conjugate()
    return phi_avg_reduced(ell, nu, q, cartan(g))


def envelope_value(theorem: str, ell: int, g, eps: float = 0.0) -> float:
    if theorem == "thm4":
        return envelope_thm4(ell, conj_normal_form(g), eps)
    return {"thm5a": envelope_thm5a, "thm5b": envelope_thm5b, "thm6": envelope_thm6}[theorem](ell, g, eps)


@dataclass
class EnvelopeReport:
    ell: int
    q: int
    theorem: str
    samples: list = field(default_factory=list)  # (descriptor, |phi|, envelope, ratio)
    max_ratio: float = 0.0
    outside: int = 0  # samples outside the hard-cutoff region (thm5 only)
    cutoff_violations: int = 0


@dataclass
class EnvelopeScan:
    reports: list
    growth: list  # (l, l', ratio growth, allowed growth, ok)

    @property
    def growth_ok(self) -> bool:
        return all(ok for *_, ok in self.growth)


def _scan_one(args):
    theorem, ell, q, desc, g, nu, eps, cutoff_const = args
    if theorem == "thm4":
        val = abs(phi_trace(SpectralParam(nu, ell, ell), g))
    else:
        val = abs(averaged_value(ell, q, g, nu))
    env = envelope_value(theorem, ell, g, eps)
    outside = viol = False
    if theorem == "thm5a":
        outside = thm5a_outside(ell, g, cutoff_const)
    elif theorem == "thm5b":
        outside = thm5b_outside(ell, g, cutoff_const)
    if outside:
        viol = val > ell ** -5.0
    return desc, val, env, val / env, outside, viol


def envelope_scan(ell_list, q, sampler, eps: float = 0.0, nu: complex = 0, theorem: str | None = None,
                  cutoff_const: float = 10.0, jobs: int = 1) -> EnvelopeScan:
    """Max ratio |phi|/envelope per l on the sampler's matrices.

    q is an int or one of 'zero', 'half', 'top' (the averaged function at
    0, ceil(l/2), l) or 'full' (the non-averaged trace function).  Growth of
    the max ratio between consecutive l beyond (log l'/log l)^3 is flagged.
    """
    if theorem is None:
        theorem = THEOREM_FOR_Q.get(q, "thm6")
    samples = list(sampler)
    reports = []
    for ell in ell_list:
        qv = q_value(ell, q) if q != "full" else ell
        work = [(theorem, ell, qv, d, g, nu, eps, cutoff_const) for d, g in samples]
        if jobs > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(jobs) as ex:
                rows = list(ex.map(_scan_one, work, chunksize=8))
        else:
            rows = [_scan_one(w) for w in work]
        rep = EnvelopeReport(ell, qv, theorem)
        rep.samples = [r[:4] for r in rows]
        rep.max_ratio = max(r[3] for r in rows)
        rep.outside = sum(r[4] for r in rows)
        rep.cutoff_violations = sum(r[5] for r in rows)
        reports.append(rep)
    growth = []
    for a, b in zip(reports, reports[1:]):
        g_obs = b.max_ratio / a.max_ratio
        g_max = (math.log(b.ell) / math.log(a.ell)) ** 3
        growth.append((a.ell, b.ell, g_obs, g_max, g_obs <= g_max))
    return EnvelopeScan(reports, growth)


def default_sampler(n: int = 200, seed: int = 0, max_norm: float = 5.0):
    """Deterministic mix: half Haar-random k1 a_h k2, the rest split between
    perturbations of K, of the diagonal torus, and of the torus normalizer in K."""
    from .mat2c import random_k

    rng = np.random.default_rng(seed)
    out = []
    kinds = ["haar"] * (n // 2) + ["nearK", "nearD", "nearS"] * (n - n // 2)
    for i, kind in enumerate(kinds[:n]):
        while True:
            if kind == "haar":
                hmax = math.acosh(max_norm ** 2 / 2)
                e = math.exp(rng.uniform(0, hmax) / 2)
                g = random_k(rng) @ Mat2C.diag(e, 1 / e) @ random_k(rng)
            else:
                eps = 10 ** rng.uniform(-3, -0.3)
                pert = Mat2C.of(np.eye(2) + eps * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))))
                if kind == "nearK":
                    base = random_k(rng)
                elif kind == "nearD":
                    z = cmath.exp(complex(rng.uniform(0, 1.5), rng.uniform(0, 2 * math.pi)))
                    base = Mat2C.diag(z, 1 / z)
                else:
                    th = rng.uniform(0, 2 * math.pi)
                    base = Mat2C(0, cmath.exp(1j * th), -cmath.exp(-1j * th), 0)
                    if rng.random() < 0.5:
                        base = Mat2C.diag(cmath.exp(1j * th), cmath.exp(-1j * th))
                g = base @ pert
                g = g * (1 / cmath.sqrt(g.det()))
            if frobenius_norm(g) <= max_norm:
                break
        out.append((f"{kind}-{i}", g))
    return out
