"""SU(2): Euler angles, Haar quadrature, Jacobi polynomials and matrix coefficients.

Half-integers (l, p, q) are accepted as floats or Fractions and converted
to doubled integers internally so congruences mod 1 are checked exactly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .mat2c import EulerAngles, Mat2C, k_matrix

k_from_euler = k_matrix


def doubled(x) -> int:
    """2x as an exact int; rejects anything that is not a half-integer."""
    f = Fraction(x).limit_denominator(4) if isinstance(x, float) else Fraction(x)
    t = 2 * f
    if t.denominator != 1 or abs(float(t) - 2 * float(x)) > 1e-12:
        raise ValueError(f"{x!r} is not a half-integer")
    return int(t)


def check_indices(ell, *idx) -> tuple[int, ...]:
    l2 = doubled(ell)
    if l2 < 0:
        raise ValueError("ell must be >= 0")
    out = [l2]
    for x in idx:
        x2 = doubled(x)
        if abs(x2) > l2 or (l2 - x2) % 2:
            raise ValueError(f"index {x} incompatible with ell = {ell}")
        out.append(x2)
    return tuple(out)


@dataclass(frozen=True)
class HaarGrid:
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.weights.size

    @property
    def nodes(self) -> list[EulerAngles]:
        return [EulerAngles(*t) for t in zip(self.u, self.v, self.w)]

    def alpha_beta(self) -> tuple[np.ndarray, np.ndarray]:
        alpha = np.exp(1j * (self.u + self.w)) * np.cos(self.v)
        beta = 1j * np.exp(1j * (self.u - self.w)) * np.sin(self.v)
        return alpha, beta

    def integrate(self, f) -> complex:
        """Integrate f(alpha, beta) (vectorized) against the probability Haar measure."""
        alpha, beta = self.alpha_beta()
        return complex(np.dot(self.weights, f(alpha, beta)))


@lru_cache(maxsize=64)
def _sin2v_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, wt = np.polynomial.legendre.leggauss(n)
    v = (x + 1) * math.pi / 4
    wt = wt * (math.pi / 4) * np.sin(2 * v)
    return v, wt / wt.sum()


def haar_grid(n_u: int, n_v: int, n_w: int) -> HaarGrid:
    if min(n_u, n_v, n_w) < 2:
        raise ValueError("node counts must be >= 2")
    u = np.arange(n_u) * (math.pi / n_u)
    w = -math.pi + np.arange(n_w) * (2 * math.pi / n_w)
    v, wv = _sin2v_rule(n_v)
    U, V, W = np.meshgrid(u, v, w, indexing="ij")
    wts = np.broadcast_to(wv[None, :, None], U.shape) / (n_u * n_w)
    return HaarGrid(U.ravel(), V.ravel(), W.ravel(), np.ascontiguousarray(wts).ravel())


def jacobi_poly(n: int, alpha, beta, x):
    """P_n^(alpha, beta)(x) by the forward three-term recurrence; x may be an array."""
    x = np.asarray(x, dtype=float)
    if n < 0:
        raise ValueError("degree must be >= 0")
    p0 = np.ones_like(x)
    if n == 0:
        return p0 if p0.ndim else float(p0)
    a, b = alpha, beta
    p1 = (a + 1) + (a + b + 2) * (x - 1) / 2
    for k in range(2, n + 1):
        c = 2 * k + a + b
        a1 = 2 * k * (k + a + b) * (c - 2)
        a2 = (c - 1) * (a * a - b * b)
        a3 = (c - 1) * c * (c - 2)
        a4 = 2 * (k + a - 1) * (k + b - 1) * c
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1
    return p1 if p1.ndim else float(p1)


def jacobi_series(n: int, alpha, beta, x) -> float:
    """Explicit sum over binomials; exact rational coefficients, used as an oracle."""
    s = Fraction(0)
    xf = Fraction(x)
    for m in range(n + 1):
        s += _binom_q(n + alpha, n - m) * _binom_q(n + beta, m) * ((xf - 1) / 2) ** m * ((xf + 1) / 2) ** (n - m)
    return float(s)


def _binom_q(top, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= Fraction(top - j, j + 1)
    return out


def _pow_c(z, k: int):
    # complex power with 0**0 = 1, vectorized
    return np.power(z, k) if k else np.ones_like(z)


def _phi_core(l2: int, p2: int, q2: int, alpha, beta):
    """Unnormalized coefficient for p >= q, p + q >= 0 via the Jacobi closed form."""
    n = (l2 - p2) // 2
    a = (p2 - q2) // 2
    b = (p2 + q2) // 2
    x = np.abs(alpha) ** 2 - np.abs(beta) ** 2
    sign = -1.0 if a % 2 else 1.0
    return sign * _pow_c(np.conj(alpha), b) * _pow_c(np.conj(beta), a) * jacobi_poly(n, a, b, x)


def _log_fact_ratio(l2: int, p2: int, q2: int) -> float:
    # log of (l-p)!(l+p)! / ((l-q)!(l+q)!)
    lg = math.lgamma
    return (lg((l2 - p2) // 2 + 1) + lg((l2 + p2) // 2 + 1)
            - lg((l2 - q2) // 2 + 1) - lg((l2 + q2) // 2 + 1))


def wigner_phi_ab(l2: int, p2: int, q2: int, alpha, beta):
    """Coefficient of z^(l-p) in (alpha z - conj(beta))^(l-q) (beta z + conj(alpha))^(l+q), doubled indices."""
    if p2 >= q2:
        if p2 + q2 >= 0:
            return _phi_core(l2, p2, q2, alpha, beta)
        # reflection (p, q) -> (-p, -q) with (alpha, beta) -> (conj alpha, -conj beta)
        return wigner_phi_ab(l2, -p2, -q2, np.conj(alpha), -np.conj(beta))
    # p < q: use unitarity of the normalized matrix, k^-1 = k[conj alpha, -beta]
    scale = math.exp(-_log_fact_ratio(l2, p2, q2))
    return scale * np.conj(wigner_phi_ab(l2, q2, p2, np.conj(alpha), -beta))


def wigner_phi(ell, p, q, k) -> complex:
    l2, p2, q2 = check_indices(ell, p, q)
    k = Mat2C.of(k)
    return complex(wigner_phi_ab(l2, p2, q2, k.a, k.b))


def wigner_phi_sum(ell, p, q, k, dps: int | None = None) -> complex:
    """The literal binomial double sum; with dps set it runs in mpmath at that precision."""
    l2, p2, q2 = check_indices(ell, p, q)
    k = Mat2C.of(k)
    lmq, lpq, lmp = (l2 - q2) // 2, (l2 + q2) // 2, (l2 - p2) // 2
    if dps is None:
        al, be = complex(k.a), complex(k.b)
        tot = 0j
        for i in range(max(0, lmp - lpq), min(lmq, lmp) + 1):
            j = lmp - i
            tot += (math.comb(lmq, i) * al ** i * (-be.conjugate()) ** (lmq - i)
                    * math.comb(lpq, j) * be ** j * al.conjugate() ** (lpq - j))
        return tot
    import mpmath

    with mpmath.workdps(dps):
        al, be = mpmath.mpc(k.a), mpmath.mpc(k.b)
        tot = mpmath.mpc(0)
        for i in range(max(0, lmp - lpq), min(lmq, lmp) + 1):
            j = lmp - i
            tot += (mpmath.binomial(lmq, i) * al ** i * (-mpmath.conj(be)) ** (lmq - i)
                    * mpmath.binomial(lpq, j) * be ** j * mpmath.conj(al) ** (lpq - j))
        return complex(tot)


def wigner_d(ell, p, q, k) -> complex:
    l2, p2, q2 = check_indices(ell, p, q)
    k = Mat2C.of(k)
    return complex(_d_ab(l2, p2, q2, k.a, k.b))


def _d_ab(l2, p2, q2, alpha, beta):
    # log-domain normalization keeps the factorial ratio finite for large l
    return math.exp(0.5 * _log_fact_ratio(l2, p2, q2)) * wigner_phi_ab(l2, p2, q2, alpha, beta)


def weights_of(ell) -> list[Fraction]:
    l2 = doubled(ell)
    return [Fraction(l2 - 2 * j, 2) for j in range(l2 + 1)]


def wigner_d_matrix(ell, k) -> np.ndarray:
    """Full normalized matrix, rows and columns ordered p, q = l, l-1, ..., -l."""
    l2 = doubled(ell)
    k = Mat2C.of(k)
    idx = [l2 - 2 * j for j in range(l2 + 1)]
    return np.array([[_d_ab(l2, p2, q2, k.a, k.b) for q2 in idx] for p2 in idx], dtype=complex)


def chi_star_eta(ell, p, k) -> complex:
    """(2l+1) Phi_{p,p}(k); evaluated through the stable diagonal Jacobi form."""
    l2, p2 = check_indices(ell, p)
    k = Mat2C.of(k)
    return (l2 + 1) * complex(diag_phi_ab(l2, p2, k.a, np.abs(k.b) ** 2))


def diag_phi_ab(l2: int, p2: int, alpha, beta_sq):
    """Phi_{p,p} from alpha and |beta|^2: conj(alpha)^(2p) P^(0,2p)_(l-p)(|a|^2 - |b|^2), mirrored for p < 0."""
    m = abs(p2)
    x = np.abs(alpha) ** 2 - beta_sq
    base = np.conj(alpha) if p2 >= 0 else alpha
    return _pow_c(base, m) * jacobi_poly((l2 - m) // 2, 0, m, x)


def chi_star_eta_sum(ell, p, k, dps: int = 50) -> complex:
    """The displayed finite alternating sum, in mpmath because the terms cancel heavily."""
    import mpmath

    l2, p2 = check_indices(ell, p)
    k = Mat2C.of(k)
    lpp, lmp = (l2 + p2) // 2, (l2 - p2) // 2
    with mpmath.workdps(dps):
        al = mpmath.mpc(k.a)
        b2 = abs(mpmath.mpc(k.b)) ** 2
        tot = mpmath.mpc(0)
        for r in range(min(lpp, lmp) + 1):
            tot += ((-1) ** r * mpmath.binomial(lpp, r) * mpmath.binomial(lmp, r)
                    * al ** (lmp - r) * mpmath.conj(al) ** (lpp - r) * b2 ** r)
        return complex((l2 + 1) * tot)


def character(ell, k) -> complex:
    """Normalized character (2l+1) * trace tau_l(k) from the eigenphase."""
    l2 = doubled(ell)
    k = Mat2C.of(k)
    c = max(-1.0, min(1.0, k.a.real))
    th = math.acos(c)
    if abs(math.sin(th)) < 1e-12:
        tr = (l2 + 1) * (1 if c > 0 or l2 % 2 == 0 else -1)
    else:
        tr = math.sin((l2 + 1) * th) / math.sin(th)
    return (l2 + 1) * tr


def restriction_identity(ell, q, u, v, w) -> complex:
    """exp(2iq(u+w)) cos(v)^(2q) P^(0,2q)_(l-q)(cos 2v), with the power taken in the log domain."""
    l2, q2 = check_indices(ell, q)
    if q2 < 0:
        raise ValueError("q must be >= 0")
    return cmath.exp(1j * q2 * (u + w)) * restriction_profile(l2, q2, v)


def restriction_profile(l2: int, q2: int, v):
    """cos(v)^(2q) P^(0,2q)_(l-q)(cos 2v) for an array of v; sign kept, magnitude via logs."""
    v = np.asarray(v, dtype=float)
    P = np.asarray(jacobi_poly((l2 - q2) // 2, 0, q2, np.cos(2 * v)), dtype=float)
    c = np.cos(v)
    if q2 == 0:
        return P
    with np.errstate(divide="ignore"):
        logmag = q2 * np.log(np.abs(c)) + np.log(np.abs(P))
    sign = np.sign(P) * (np.sign(c) ** q2)
    return sign * np.exp(logmag)
