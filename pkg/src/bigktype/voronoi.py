"""The Voronoi kernel W_P(x, nu, p) of the Rankin-Selberg functional equation over Q(i).

    W_P(x) = 1/(8 pi i) int_(c) zeta_K(2s) (w^(s) - E(s) w^(1-s)) x^{-2s} ds,
    E(s)   = P^{2-4s} 16^{2s-1} Gamma(s, nu, p) / Gamma(1-s, nu, p),

with zeta_K the Dedekind zeta function of Q(i), computed as zeta * L(chi_-4)
by Euler-Maclaurin.  The kernel is evaluated on one vertical line: the bump
Mellin transform comes from an FFT in log x and the zeta heads from the
compiled Dirichlet-series kernel.  E grows like |t|^{4(2c-1)} while w^ decays
like exp(-0.57 sqrt|t|), so the default abscissa hugs the Gamma poles.

The first term alone has a second route: opening zeta_K(2s) as
1/4 sum_{n != 0} |n|^{-4s} turns it into (1/16) sum r2(m) w(m^2 x^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import bernoulli, loggamma

from . import _kernels

LOG_2PI = math.log(2 * math.pi)


@dataclass(frozen=True)
class SpectralPair:
    nu1: complex
    nu2: complex
    p1: int
    p2: int

    def swapped(self, j: int) -> "SpectralPair":
        """(nu_j, p_j) -> (p_j, nu_j); needs integer nu_j."""
        nu = self.nu1 if j == 1 else self.nu2
        if complex(nu).imag != 0 or complex(nu).real != round(complex(nu).real):
            raise ValueError("swap needs an integer nu")
        if j == 1:
            return SpectralPair(self.p1, self.nu2, int(round(complex(nu).real)), self.p2)
        return SpectralPair(self.nu1, self.p2, self.p1, int(round(complex(nu).real)))

    def negated(self, j: int) -> "SpectralPair":
        if j == 1:
            return SpectralPair(-self.nu1, self.nu2, -self.p1, self.p2)
        return SpectralPair(self.nu1, -self.nu2, self.p1, -self.p2)


def _shifts(pair: SpectralPair) -> list[tuple[complex, float]]:
    out = []
    for e1 in (1, -1):
        for e2 in (1, -1):
            out.append(((e1 * pair.nu1 + e2 * pair.nu2) / 2, abs(e1 * pair.p1 + e2 * pair.p2) / 2))
    return out


def _check_poles(z, what: str):
    z = np.asarray(z)
    near = (np.abs(z.imag) < 1e-8) & (z.real < 1e-8) & (np.abs(z.real - np.round(z.real)) < 1e-8)
    if np.any(near):
        raise ValueError(f"{what} within 1e-8 of a Gamma pole")


def log_gamma_c(s):
    """log of Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s)."""
    s = np.asarray(s, dtype=complex)
    return math.log(2) - s * LOG_2PI + loggamma(s)


def gamma_factor(s, pair: SpectralPair, check: bool = True):
    """log Gamma(s, nu, p): real part is the log-magnitude, imaginary part the phase."""
    s = np.asarray(s, dtype=complex)
    tot = np.zeros_like(s)
    for a, b in _shifts(pair):
        arg = s + a + b
        if check:
            _check_poles(arg, "s")
        tot = tot + log_gamma_c(arg)
    return tot


def log_gamma_ratio(s, pair: SpectralPair):
    """log of Gamma(s, nu, p) / Gamma(1 - s, nu, p); a denominator pole gives log 0 = -inf."""
    s = np.asarray(s, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        den = gamma_factor(1 - s, pair, check=False)
    den = np.where(np.isfinite(den.real), den, complex(np.inf))
    return gamma_factor(s, pair) - den


def _pole_order(z: complex, pair: SpectralPair) -> int:
    """Order of the pole of Gamma(s)/Gamma(1-s) at s = z (negative for a zero)."""
    order = 0
    for a, b in _shifts(pair):
        num = z + a + b
        den = 1 - z + a + b
        for w, sign in ((num, 1), (den, -1)):
            w = complex(w)
            if abs(w.imag) < 1e-9 and w.real < 1e-9 and abs(w.real - round(w.real)) < 1e-9:
                order += sign
    return order


def rightmost_pole(pair: SpectralPair) -> float:
    """Largest real part of a pole of Gamma(s, nu, p)/Gamma(1-s, nu, p) after cancellations.

    Integer nu_j make many numerator poles cancel against the denominator,
    e.g. nu = (3, 3), p = 0 has no pole right of s = 0.
    """
    cands = []
    for a, b in _shifts(pair):
        base = -complex(a) - b
        for k in range(0, 40):
            cands.append(base - k)
    best = -math.inf
    for z in sorted(cands, key=lambda z: -z.real):
        if z.real <= best:
            break
        if _pole_order(z, pair) > 0:
            best = z.real
    return best


# ---- bump weight -------------------------------------------------------------------------


def _bump_raw(x):
    x = np.asarray(x, dtype=float)
    u = 2 * x - 3
    out = np.zeros_like(x)
    inside = np.abs(u) < 1
    out[inside] = np.exp(-1 / (1 - u[inside] ** 2))
    return out


def _bump_derivative(k: int, x) -> np.ndarray:
    """k-th x-derivative of exp(-1/(1-u^2)), u = 2x - 3, via f^(n+1) = sum C(n,j) f^(j) g^(n-j+1)."""
    x = np.asarray(x, dtype=float)
    u = 2 * x - 3
    inside = np.abs(u) < 1
    ui = u[inside]

    def g(m):
        # m-th u-derivative of g(u) = -1/(1-u^2) = -(1/(1-u) + 1/(1+u)) / 2
        return -0.5 * math.factorial(m) * (1 / (1 - ui) ** (m + 1) + (-1) ** m / (1 + ui) ** (m + 1))

    f = [np.exp(-1 / (1 - ui ** 2))]
    for n in range(k):
        f.append(sum(math.comb(n, j) * f[j] * g(n - j + 1) for j in range(n + 1)))
    out = np.zeros_like(x)
    out[inside] = f[k] * 2.0 ** k
    return out


@dataclass(frozen=True)
class BumpWeight:
    """w(x) = c exp(-1/(1-(2x-3)^2)) on (1, 2), with c chosen so that w^(1) = int w dx = 1."""

    c: float

    def __call__(self, x):
        return self.c * _bump_raw(x)

    def mellin(self, s) -> complex:
        """w^(s) = int w(x) x^{s-1} dx by adaptive quadrature."""
        s = complex(s)
        re = quad(lambda x: self.c * float(_bump_raw(x)) * (x ** (s - 1)).real, 1, 2, limit=400)[0]
        im = quad(lambda x: self.c * float(_bump_raw(x)) * (x ** (s - 1)).imag, 1, 2, limit=400)[0]
        return complex(re, im)

    def mellin_by_parts(self, s, k: int = 6, n: int = 20001) -> complex:
        """(-1)^k / (s (s+1) ... (s+k-1)) int w^(k)(x) x^{s+k-1} dx."""
        s = complex(s)
        x = np.linspace(1, 2, n)
        integrand = self.c * _bump_derivative(k, x) * x ** (s + k - 1)
        val = np.sum(integrand) * (x[1] - x[0])
        den = np.prod([s + j for j in range(k)])
        return (-1) ** k * val / den

    def by_parts_bound(self, s, k: int = 6, n: int = 20001) -> float:
        """|w^(s)| <= int |w^(k)| x^{sigma+k-1} dx / prod |s + j|."""
        s = complex(s)
        x = np.linspace(1, 2, n)
        val = np.sum(np.abs(self.c * _bump_derivative(k, x)) * x ** (s.real + k - 1)) * (x[1] - x[0])
        return float(val / np.prod([abs(s + j) for j in range(k)]))

    def mellin_line(self, sigma: float, dT: float, n_fft: int) -> tuple[np.ndarray, np.ndarray]:
        """w^(sigma + i k dT) for k = -n_fft/2 .. n_fft/2 - 1 via one FFT in y = log x."""
        dy = 2 * math.pi / (n_fft * dT)
        m = int(math.log(2) / dy) + 1
        y = np.arange(m) * dy
        g = np.zeros(n_fft)
        g[:m] = self(np.exp(y)) * np.exp(sigma * y)
        vals = np.fft.ifft(g) * n_fft * dy
        k = np.fft.fftfreq(n_fft, d=1.0 / n_fft)
        order = np.argsort(k)
        return k[order] * dT, vals[order]


@lru_cache(maxsize=None)
def bump_weight() -> BumpWeight:
    area = quad(lambda x: float(_bump_raw(x)), 1, 2, epsabs=0, epsrel=1e-13, limit=200)[0]
    return BumpWeight(1 / area)


# ---- Dedekind zeta of Q(i) ---------------------------------------------------------------

_B2J = bernoulli(60)[2::2]


def _em_tail(s, a: float, N: int, corrections: int = 24):
    """zeta(s, a) - sum_{k<N} (k+a)^{-s} by Euler-Maclaurin."""
    Na = N + a
    lN = math.log(Na)
    tail = np.exp((1 - s) * lN) / (s - 1) + 0.5 * np.exp(-s * lN)
    # sum_j B_2j/(2j)! s(s+1)...(s+2j-2) Na^{-s-2j+1}
    term = s * np.exp(-(s + 1) * lN)
    for j in range(1, corrections + 1):
        tail = tail + _B2J[j - 1] / math.factorial(2 * j) * term
        term = term * (s + 2 * j - 1) * (s + 2 * j) / (Na * Na)
    return tail


def _em_terms(s) -> int:
    # |s| / (2 pi N) <= 1/2 keeps the 24 correction terms at ~1e-15
    return int(np.max(np.abs(s)) / math.pi) + 20


def hurwitz_zeta(s, a: float, terms: int | None = None):
    """zeta(s, a) by Euler-Maclaurin; vectorised over s, valid away from s = 1."""
    s = np.asarray(s, dtype=complex)
    N = _em_terms(s) if terms is None else terms
    logk = np.log(np.arange(N, dtype=float) + a)
    flat = s.ravel()
    head = np.empty(flat.shape, dtype=complex)
    chunk = max(1, 2_000_000 // N)
    for i in range(0, flat.size, chunk):
        head[i:i + chunk] = np.exp(-np.outer(flat[i:i + chunk], logk)).sum(axis=1)
    return head.reshape(s.shape) + _em_tail(s, a, N)


def dedekind_zeta_gauss(s):
    """zeta_{Q(i)}(s) = zeta(s) L(s, chi_-4), L via Hurwitz zeta at 1/4 and 3/4."""
    s = np.asarray(s, dtype=complex)
    z = hurwitz_zeta(s, 1.0)
    L = np.exp(-s * math.log(4)) * (hurwitz_zeta(s, 0.25) - hurwitz_zeta(s, 0.75))
    return z * L


def dedekind_zeta_line(sigma: float, t0: float, dt: float, n: int, blocks: int = 32) -> np.ndarray:
    """zeta_{Q(i)}(sigma + i (t0 + j dt)) for j < n, heads summed by the compiled kernel."""
    out = np.empty(n, dtype=complex)
    step = max(1, -(-n // blocks))
    for i in range(0, n, step):
        m = min(step, n - i)
        ta = t0 + i * dt
        s = sigma + 1j * (ta + np.arange(m) * dt)
        N = _em_terms(s)
        k = np.arange(N, dtype=float)
        zhead = _kernels.dirichlet_line(np.log(k + 1), np.ones(N), sigma, ta, dt, m)
        lh = np.concatenate([np.log(4 * k + 1), np.log(4 * k + 3)])
        lc = np.concatenate([np.ones(N), -np.ones(N)])
        Lhead = _kernels.dirichlet_line(lh, lc, sigma, ta, dt, m)
        z = zhead + _em_tail(s, 1.0, N)
        L = Lhead + np.exp(-s * math.log(4)) * (_em_tail(s, 0.25, N) - _em_tail(s, 0.75, N))
        out[i:i + m] = z * L
    return out


def r2(m: int) -> int:
    """Number of n in Z[i] with |n|^2 = m."""
    if m == 0:
        return 1
    tot = 0
    d = 1
    while d * d <= m:
        if m % d == 0:
            for e in {d, m // d}:
                if e % 2:
                    tot += 1 if e % 4 == 1 else -1
        d += 1
    return 4 * tot


# ---- kernel ------------------------------------------------------------------------------

# |w^(sigma + iT)| <= 2 exp(-0.55 sqrt T) for T >= 1000 on -2 <= sigma <= 3 (measured envelope)
_WHAT_DECAY = 0.55


def _dual_factor(s, pair: SpectralPair, P: float):
    """log E(s) = log(P^{2-4s} 16^{2s-1} Gamma(s)/Gamma(1-s))."""
    return (2 - 4 * s) * math.log(P) + (2 * s - 1) * math.log(16) + log_gamma_ratio(s, pair)


def default_abscissa(pair: SpectralPair) -> float:
    """A quarter right of the Gamma poles (at least 1/4), clear of the removable point s = 1/2."""
    c = max(rightmost_pole(pair) + 0.25, 0.25)
    if abs(c - 0.5) < 0.05:
        c = 0.55
    return c


def auto_tmax(c: float, tol: float = 1e-16) -> float:
    """Height past which |E(s) w^(1-s)| on Re s = c is below tol."""
    T = 3000.0
    grow = 4 * (2 * c - 1)
    while True:
        logb = grow * math.log(T / (2 * math.pi)) + (4 * c - 2) * math.log(16) \
            + math.log(2) - _WHAT_DECAY * math.sqrt(T)
        if logb < math.log(tol) or T > 60000:
            return T
        T *= 1.25


def _fft_size(dT: float, t_max: float) -> int:
    need = max(2 * t_max / dT + 2, 2 * math.pi * 2000 / (dT * math.log(2)))
    return 1 << math.ceil(math.log2(need))


@lru_cache(maxsize=16)
def _zeta_line(c: float, dT: float, K: int) -> np.ndarray:
    """zeta_K(2(c + i k dT)) for k = -K..K; conjugate symmetry halves the work."""
    out = dedekind_zeta_line(2 * c, 0.0, 2 * dT, K + 1)
    return np.concatenate([np.conj(out[:0:-1]), out])


@dataclass
class KernelLine:
    """Everything on Re s = c except the factor x^{-2s}."""

    c: float
    T: np.ndarray
    dT: float
    body: np.ndarray  # zeta_K(2s) (w^(s) - E(s) w^(1-s)) dT / (8 pi)

    def __call__(self, x: float) -> complex:
        return complex(np.dot(self.body, np.exp(-2 * (self.c + 1j * self.T) * math.log(x))))

    def peak(self) -> float:
        return float(np.max(np.abs(self.body)) * 8 * math.pi / self.dT)


@lru_cache(maxsize=64)
def kernel_line(pair: SpectralPair, P: float, c: float, dT: float, t_max: float) -> KernelLine:
    if c <= rightmost_pole(pair):
        raise ValueError("contour must lie right of the Gamma poles")
    bump = bump_weight()
    n_fft = _fft_size(dT, t_max)
    K = int(t_max / dT)
    T, w_s = bump.mellin_line(c, dT, n_fft)
    _, w_dual = bump.mellin_line(1 - c, dT, n_fft)
    mid = n_fft // 2  # index of T = 0
    sl = slice(mid - K, mid + K + 1)
    T, w_s = T[sl], w_s[sl]
    w_dual = w_dual[sl][::-1]  # w^(1 - c - iT)
    s = c + 1j * T
    E = np.exp(_dual_factor(s, pair, P))
    bracket = w_s - E * w_dual
    zk = _zeta_line(c, dT, K)
    if c == 0.5:
        # removable: the bracket vanishes where zeta_K(2s) has its pole
        zk[K] = 0.0
    body = zk * bracket * dT / (8 * math.pi)
    return KernelLine(c, T, dT, body)


def voronoi_kernel(x: float, pair: SpectralPair, P: float = 1.0, contour: float | None = None,
                   dT: float = 0.04, t_max: float | None = None) -> complex:
    """W_P(x, nu, p), integrating the full display on Re s = `contour`.

    The integrand is regular at s = 1/2, so any abscissa right of the Gamma
    poles gives the same value; the default sits where E(s) is smallest.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    if P < 1:
        raise ValueError("P must be >= 1")
    c = default_abscissa(pair) if contour is None else float(contour)
    tm = auto_tmax(c) if t_max is None else float(t_max)
    return kernel_line(pair, float(P), c, float(dT), tm)(x)


def first_term_contour(x: float, c: float, dT: float = 0.05, t_max: float = 3000.0) -> complex:
    """1/(8 pi i) int_(c) zeta_K(2s) w^(s) x^{-2s} ds for c > 1/2."""
    if c <= 0.5:
        raise ValueError("needs c > 1/2")
    bump = bump_weight()
    n_fft = _fft_size(dT, t_max)
    K = int(t_max / dT)
    T, wv = bump.mellin_line(c, dT, n_fft)
    mid = n_fft // 2
    T, wv = T[mid - K:mid + K + 1], wv[mid - K:mid + K + 1]
    s = c + 1j * T
    F = _zeta_line(c, dT, K) * wv * np.exp(-2 * s * math.log(x))
    return complex(np.sum(F) * dT / (8 * math.pi))


def first_term_lattice(x: float) -> float:
    """(1/16) sum_{n in Z[i], n != 0} w(|n|^4 x^2): the first term with zeta_K opened."""
    bump = bump_weight()
    tot = 0.0
    m = 1
    while m * m * x * x < 2:
        tot += r2(m) * float(bump(m * m * x * x))
        m += 1
    return tot / 16


def integrand_peak(pair: SpectralPair, c: float, P: float = 1.0, t_max: float = 3000.0,
                   dT: float = 0.5) -> float:
    """max_T |zeta_K(2s) E(s) w^(1-s)| on Re s = c: the size double precision has to cancel."""
    bump = bump_weight()
    T = np.arange(0, t_max, dT)
    s = c + 1j * T
    w = np.array([bump.mellin(1 - z) for z in s[:: max(1, len(s) // 400)]])
    Ts = T[:: max(1, len(s) // 400)]
    ss = c + 1j * Ts
    val = np.abs(dedekind_zeta_gauss(2 * ss) * np.exp(_dual_factor(ss, pair, P)) * w)
    return float(np.max(val))


def decay_slope(pair: SpectralPair, P: float = 1.0, xs=None, **kw) -> tuple[float, np.ndarray]:
    """Least-squares slope of log|W_P| against log x, and the sampled |W_P|."""
    xs = np.geomspace(10, 100, 9) if xs is None else np.asarray(xs, dtype=float)
    vals = np.array([abs(voronoi_kernel(float(x), pair, P, **kw)) for x in xs])
    return float(np.polyfit(np.log(xs), np.log(vals), 1)[0]), vals
