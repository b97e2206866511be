"""Exact counts of Hecke matrices gamma whose normalized conjugate sits near K, D, S or a unipotent.

Write x = g^-1 gamma g = (t/2) I + Y with t = a + d.  The traceless part Y
is linear in (a - d, b, c) and det x = n forces

    t^2 = (a - d)^2 + 4bc + 4n,

so t is an exact Gaussian square root once (a - d, b, c) is known.  Each
predicate below confines Y to an ellipsoid (thin in the directions the
target set pins down), which makes the search a lattice walk in Z^6.  The
float predicates are applied afterwards, with a guard band.
"""
from __future__ import annotations

import cmath
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import _kernels
from .gaussint import GaussInt, amplifier_primes, divisor_pairs, norm, normalize, reduce_mod, residues_mod
from .mat2c import Mat2C, frobenius_norm

GUARD = 1e-9
MAX_L = 40
# relative slack on the ellipsoid; the exact filters run afterwards
_SLACK = 1e-7


class Regime(Enum):
    UNIT = 0
    MID = 2
    HIGH = 4


class Predicate(Enum):
    THM1_M = "THM1_M"
    M_STAR = "M_STAR"
    M_STAR_0 = "M_STAR_0"
    M_K = "M_K"
    M_D = "M_D"
    Q_PAIRS = "Q_PAIRS"


class ResourceGuardExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class CountSpec:
    g: Mat2C
    L: float
    regime: Regime
    predicate: Predicate
    delta1: float = 0.1
    delta2: float = 0.1
    implied_constant: float = 10.0
    ell: float = 1e6
    H1: float = 1.0
    H2: float = 1.0
    # absolute constant in the norm condition of M_D
    norm_bound: float = 3.0
    max_nodes: int = 4_000_000_000

    def __post_init__(self):
        object.__setattr__(self, "g", Mat2C.of(self.g))
        object.__setattr__(self, "regime", Regime(self.regime) if not isinstance(self.regime, str)
                           else Regime[self.regime])
        object.__setattr__(self, "predicate", Predicate(self.predicate))
        if self.delta1 <= 0 or self.delta2 <= 0:
            raise ValueError("deltas must be positive")
        if self.H1 <= 0 or self.H2 <= 0:
            raise ValueError("H1, H2 must be positive")
        if abs(self.g.det() - 1) > 1e-9:
            raise ValueError("g must have determinant 1")
        amplified = self.predicate is not Predicate.Q_PAIRS and self.regime is not Regime.UNIT
        if amplified and self.L < 7:
            raise ValueError("amplifier regimes need L >= 7")
        if self.L < 1:
            raise ValueError("L must be >= 1")

    @property
    def big_l(self) -> float:
        return float(self.L) ** self.regime.value


@dataclass
class CountResult:
    spec: CountSpec
    count: int
    upper: int
    per_n: dict = field(default_factory=dict)
    parabolic: int = 0
    parabolic_upper: int = 0
    nonparabolic: int = 0
    nonparabolic_upper: int = 0
    folded: int | None = None
    identity_failures: int = 0
    nodes: int = 0
    wall_time: float = 0.0

    @property
    def exact(self) -> bool:
        return self.count == self.upper

    @property
    def interval(self) -> tuple[int, int]:
        return self.count, self.upper


# -- the set D(L, regime) ---------------------------------------------------

def hecke_support(L: float, regime) -> list[GaussInt]:
    """n = 1, l1 l2 or (l1 l2)^2 over amplifier primes, filtered to the |n|^2 window."""
    regime = Regime[regime] if isinstance(regime, str) else Regime(regime)
    if regime is Regime.UNIT:
        return [GaussInt(1)]
    primes = amplifier_primes(L)
    out = set()
    for i, l1 in enumerate(primes):
        for l2 in primes[i:]:
            n = l1 * l2
            out.add(n if regime is Regime.MID else n * n)
    big = float(L) ** regime.value
    return sorted(n for n in out if big <= norm(n) <= 16 * big)


# -- ellipsoids in (a - d, b, c) ------------------------------------------

def _y_of(v: np.ndarray, g: Mat2C, scale: complex) -> np.ndarray:
    """Traceless part of g^-1 gamma g / scale for v = (Re e, Im e, Re b, Im b, Re c, Im c), e = a - d."""
    e, b, c = complex(v[0], v[1]), complex(v[2], v[3]), complex(v[4], v[5])
    gi = g.inv()
    y = (gi @ Mat2C(e / 2, b, c, -e / 2) @ g) * (1 / scale)
    return np.array([y.a.real, y.a.imag, y.b.real, y.b.imag, y.c.real, y.c.imag, y.d.real, y.d.imag])


def traceless_map(g, scale: complex = 1.0) -> np.ndarray:
    """Real 8x6 matrix sending (a - d, b, c) to the traceless part of g^-1 gamma g / scale.

    With scale = sqrt n this is the traceless part of g^-1 gamma~ g itself;
    the phase matters for the Hermitian splits.
    """
    g = Mat2C.of(g)
    return np.stack([_y_of(col, g, complex(scale)) for col in np.eye(6)], axis=1)


def _adjoint_op() -> np.ndarray:
    # Y -> Y^H on the 8 real coordinates
    op = np.zeros((8, 8))
    for i, j in ((0, 0), (1, 2), (2, 1), (3, 3)):
        op[2 * j, 2 * i] = 1
        op[2 * j + 1, 2 * i + 1] = -1
    return op


_ADJ = _adjoint_op()
PROJ = {
    "full": np.eye(8),
    "diag": np.diag([1, 1, 0, 0, 0, 0, 1, 1.0]),
    "off": np.diag([0, 0, 1, 1, 1, 1, 0, 0.0]),
    "herm": (np.eye(8) + _ADJ) / 2,
    "antiherm": (np.eye(8) - _ADJ) / 2,
    "re_diag": np.diag([1, 0, 0, 0, 0, 0, 1, 0.0]),
    "im_diag": np.diag([0, 1, 0, 0, 0, 0, 0, 1.0]),
    # (y12 +- conj y21) / sqrt 2, both of operator norm 1
    "off_plus": np.array([[0, 0, 1, 0, 1, 0, 0, 0], [0, 0, 0, 1, 0, -1, 0, 0]]) / math.sqrt(2),
    "off_minus": np.array([[0, 0, 1, 0, -1, 0, 0, 0], [0, 0, 0, 1, 0, 1, 0, 0]]) / math.sqrt(2),
}


def ellipsoid_form(g, parts, scale: complex = 1.0) -> tuple[np.ndarray, np.ndarray, float]:
    """(qdiag, mu, bound) of an ellipsoid holding every Y with ||P_j Y|| <= r_j for all j.

    The balls are combined as sum_j w_j ||P_j Y||^2 / r_j^2 <= sum_j w_j with
    w_j the rank of P_j on traceless matrices, the least-volume choice.
    """
    m = traceless_map(g, scale)
    gram = np.zeros((6, 6))
    total = 0.0
    for name, r in parts:
        pm = PROJ[name] @ m
        w = float(np.linalg.matrix_rank(pm))
        gram += w * (pm.T @ pm) / (r * r)
        total += w
    up = np.linalg.cholesky(gram).T
    diag = np.diag(up).copy()
    mu = up / diag[:, None]
    return diag ** 2, mu, total * (1 + _SLACK) ** 2


def _solutions(n: GaussInt, g: Mat2C, parts_m, max_nodes: int) -> tuple[np.ndarray, int]:
    qd, mu, bound = ellipsoid_form(g, parts_m, cmath.sqrt(complex(n)))
    rows, nodes = _kernels.det_points(qd, mu, bound, n.re, n.im, max_nodes)
    if nodes < 0:
        raise ResourceGuardExceeded(f"lattice walk for n = {n} passed {max_nodes} nodes")
    if len(rows):
        rows = np.unique(rows, axis=0)
    return rows, nodes


def _as_complex(rows: np.ndarray):
    a = rows[:, 0] + 1j * rows[:, 1]
    b = rows[:, 2] + 1j * rows[:, 3]
    c = rows[:, 4] + 1j * rows[:, 5]
    d = rows[:, 6] + 1j * rows[:, 7]
    return a, b, c, d


def _conjugate(g: Mat2C, rows: np.ndarray, sqrt_n):
    """Entries of g^-1 gamma g / sqrt(n), vectorized; sqrt_n may be an array."""
    a, b, c, d = _as_complex(rows)
    gi = g.inv()
    # (gi @ gamma) @ g
    p11 = gi.a * a + gi.b * c
    p12 = gi.a * b + gi.b * d
    p21 = gi.c * a + gi.d * c
    p22 = gi.c * b + gi.d * d
    m11 = (p11 * g.a + p12 * g.c) / sqrt_n
    m12 = (p11 * g.b + p12 * g.d) / sqrt_n
    m21 = (p21 * g.a + p22 * g.c) / sqrt_n
    m22 = (p21 * g.b + p22 * g.d) / sqrt_n
    return m11, m12, m21, m22


def _is_parabolic(rows: np.ndarray) -> np.ndarray:
    a, b, c, d = _as_complex(rows)
    e = a - d
    disc = e * e + 4 * b * c
    # integer-valued complex128; exact while entries stay below 2^26
    return disc == 0


# -- vectorized distances -----------------------------------------------------

def _fro2(m):
    return sum(np.abs(x) ** 2 for x in m)


def _dist_k(m):
    a, b, c, d = m
    mm = np.hypot(np.abs(a + np.conj(d)), np.abs(b - np.conj(c)))
    return np.sqrt(np.maximum(0.0, _fro2(m) + 2 - 2 * mm))


def _dist_s(m):
    a, b, c, d = m
    mm = np.maximum(np.abs(np.conj(a) + d), np.abs(np.conj(b) - c))
    return np.sqrt(np.maximum(0.0, _fro2(m) + 2 - 2 * mm))


def _dist_d(m, chunk: int = 2048):
    """Distance to diag(z, 1/z): coarse grid in log r, then golden section."""
    if len(m[0]) > chunk:
        return np.concatenate([_dist_d(tuple(x[i:i + chunk] for x in m), chunk)
                               for i in range(0, len(m[0]), chunk)])
    a, b, c, d = m
    if len(a) == 0:
        return np.zeros(0)
    ac = np.conj(a)[:, None]
    dd = d[:, None]
    base = (np.abs(a) ** 2 + np.abs(d) ** 2)[:, None]

    def f(s):
        r = np.exp(s)
        return base + r * r + 1 / (r * r) - 2 * np.abs(ac * r + dd / r)

    grid = np.linspace(-20, 20, 401)
    vals = f(grid[None, :])
    i = np.argmin(vals, axis=1)
    lo = grid[np.maximum(i - 1, 0)][:, None]
    hi = grid[np.minimum(i + 1, len(grid) - 1)][:, None]
    phi = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - phi * (hi - lo), lo + phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(80):
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x2n = np.where(left, x1, lo + phi * (hi - lo))
        x1n = np.where(left, hi - phi * (hi - lo), x2)
        x1, x2 = x1n, x2n
        f1, f2 = f(x1), f(x2)
    best = np.minimum(np.minimum(f1, f2), vals.min(axis=1, keepdims=True))[:, 0]
    return np.sqrt(np.maximum(0.0, np.abs(b) ** 2 + np.abs(c) ** 2 + best))


def _big_d(m):
    a, b, c, d = m
    return np.abs(np.abs(a) ** 2 - np.abs(d) ** 2) + np.abs(np.abs(b) ** 2 - np.abs(c) ** 2)


def _zu(m, parabolic):
    """(z, |u|) of the normal form g = k [[z, u], [0, 1/z]] k^-1, |z| >= 1."""
    tr = m[0] + m[3]
    disc = np.sqrt(tr * tr - 4 + 0j)
    z1 = (tr + disc) / 2
    z = np.where(np.abs(z1) >= 1, z1, (tr - disc) / 2)
    z = np.where(parabolic, np.where(tr.real > 0, 1.0 + 0j, -1.0 + 0j), z)
    az2 = np.abs(z) ** 2
    u = np.sqrt(np.maximum(0.0, _fro2(m) - az2 - 1 / az2))
    return z, u


def _le(val, thr):
    band = GUARD * max(1.0, abs(thr))
    return val <= thr - band, val <= thr + band


def _both(*conds):
    lo = np.logical_and.reduce([c[0] for c in conds])
    hi = np.logical_and.reduce([c[1] for c in conds])
    return lo, hi


# -- predicates ---------------------------------------------------------------

def _shapes(pred: Predicate, d1: float, d2: float, norm_bound: float) -> list:
    """Ellipsoids (as lists of (projection, radius) in units of sqrt|n|) whose union holds every hit."""
    r2 = math.sqrt(2)
    if pred is Predicate.THM1_M:
        # ||Y||^2 = |z - 1/z|^2/2 + |u|^2 <= 2 d1^2 + d2^2
        return [[("full", math.sqrt(2 * d1 * d1 + d2 * d2))]]
    if pred is Predicate.M_K:
        # the traceless part of a point of K is anti-Hermitian of norm <= sqrt 2
        return [[("antiherm", r2 + d1), ("herm", d1)]]
    if pred is Predicate.M_STAR_0:
        # S = diagonal unitaries (traceless part i sin(th) diag(1, -1)) and
        # skew ones [[0, -e^-ith], [e^ith, 0]] (off_plus part 0)
        return [[("off", d1), ("re_diag", d1), ("im_diag", r2 + d1)],
                [("diag", d1), ("off_plus", d1), ("off_minus", r2 + d1)]]
    if pred is Predicate.M_STAR:
        return [[("antiherm", r2 + d1), ("herm", d1), ("diag", r2 + d1), ("off", d2)]]
    if pred is Predicate.M_D:
        return [[("diag", norm_bound), ("off", d1)]]
    raise ValueError(pred)


def _measures(pred: Predicate, m, parabolic) -> dict:
    if pred is Predicate.THM1_M:
        z, u = _zu(m, parabolic)
        near = np.where(parabolic, 0.0, np.minimum(np.abs(z - 1), np.abs(z + 1)))
        return {"near": near, "u": u, "fold": np.abs(z - 1) <= np.abs(z + 1)}
    if pred is Predicate.M_K:
        return {"dk": _dist_k(m)}
    if pred is Predicate.M_STAR:
        return {"dk": _dist_k(m), "dd": _dist_d(m)}
    if pred is Predicate.M_STAR_0:
        return {"ds": _dist_s(m), "ratio": _big_d(m) / _fro2(m)}
    if pred is Predicate.M_D:
        return {"fro": np.sqrt(_fro2(m)), "dd": _dist_d(m)}
    raise ValueError(pred)


def _masks(spec: CountSpec, meas: dict, d1: float, d2: float):
    pred = spec.predicate
    if pred is Predicate.THM1_M:
        return _both(_le(meas["near"], d1), _le(meas["u"], d2))
    if pred is Predicate.M_K:
        return _le(meas["dk"], d1)
    if pred is Predicate.M_STAR:
        return _both(_le(meas["dk"], d1), _le(meas["dd"], d2))
    if pred is Predicate.M_STAR_0:
        thr = spec.implied_constant * math.log(spec.ell) / math.sqrt(spec.ell)
        return _both(_le(meas["ds"], d1), _le(meas["ratio"], thr))
    if pred is Predicate.M_D:
        return _both(_le(meas["fro"], spec.norm_bound), _le(meas["dd"], d1))
    raise ValueError(pred)


def _identity_failures(rows: np.ndarray, n: GaussInt, parabolic) -> int:
    """Exact checks: det = n, the parabolic identity, and trace +-2 sqrt n on parabolic rows."""
    a, b, c, d = _as_complex(rows)
    nn = complex(n)
    t = a + d
    bad = (a * d - b * c != nn) | ((a - d) ** 2 + 4 * b * c != t * t - 4 * nn)
    bad |= parabolic & (t * t != 4 * nn)
    return int(bad.sum())


def count(spec: CountSpec) -> CountResult:
    """Exact count over n in D(L, regime), or over L <= |n| <= 2L for Q_PAIRS.

    M_K, M_STAR_0 and M_D read their single radius from delta1;
    Q_PAIRS reads H1 and H2.
    """
    if spec.predicate is Predicate.Q_PAIRS:
        return count_grid(spec, [(spec.H1, spec.H2)])[0]
    return count_grid(spec, [(spec.delta1, spec.delta2)])[0]


def count_grid(spec: CountSpec, pairs) -> list[CountResult]:
    """count() for each (delta1, delta2) in pairs, from one enumeration at the largest radii.

    For Q_PAIRS the pairs are (H1, H2).
    """
    if spec.L > MAX_L:
        raise ResourceGuardExceeded(f"L = {spec.L} is beyond the desk-scale guard L <= {MAX_L}")
    pairs = [(float(x), float(y)) for x, y in pairs]
    t0 = time.perf_counter()
    if spec.predicate is Predicate.Q_PAIRS:
        out = _count_q(spec, pairs)
    else:
        out = _count_amplified(spec, pairs)
    wall = time.perf_counter() - t0
    for r in out:
        r.wall_time = wall
    return out


def _count_amplified(spec: CountSpec, pairs) -> list[CountResult]:
    d1max = max(p[0] for p in pairs)
    d2max = max(p[1] for p in pairs)
    shapes = _shapes(spec.predicate, d1max, d2max, spec.norm_bound)
    results = [CountResult(spec=replace(spec, delta1=x, delta2=y), count=0, upper=0) for x, y in pairs]
    if spec.predicate is Predicate.THM1_M:
        for r in results:
            r.folded = 0
    nodes = bad = 0
    for n in hecke_support(spec.L, spec.regime):
        found = []
        for shape in shapes:
            rows, k = _solutions(n, spec.g, shape, spec.max_nodes)
            nodes += k
            found.append(rows)
        rows = np.unique(np.concatenate(found), axis=0)
        if not len(rows):
            for r in results:
                r.per_n[n] = 0
            continue
        par = _is_parabolic(rows)
        bad += _identity_failures(rows, n, par)
        m = _conjugate(spec.g, rows, cmath.sqrt(complex(n)))
        meas = _measures(spec.predicate, m, par)
        for r, (x, y) in zip(results, pairs):
            lo, hi = _masks(spec, meas, x, y)
            r.per_n[n] = int(lo.sum())
            r.count += int(lo.sum())
            r.upper += int(hi.sum())
            r.parabolic += int((lo & par).sum())
            r.parabolic_upper += int((hi & par).sum())
            r.nonparabolic += int((lo & ~par).sum())
            r.nonparabolic_upper += int((hi & ~par).sum())
            if r.folded is not None:
                r.folded += int((lo & meas["fold"]).sum())
    for r in results:
        r.nodes = nodes
        r.identity_failures = bad
    return results


def _gauss_disc(radius: float) -> np.ndarray:
    r = int(math.floor(radius))
    xs = np.arange(-r, r + 1)
    re, im = np.meshgrid(xs, xs, indexing="ij")
    keep = re * re + im * im <= radius * radius
    return (re[keep] + 1j * im[keep]).astype(complex)


def _count_q(spec: CountSpec, pairs) -> list[CountResult]:
    L, g = float(spec.L), spec.g
    hs = sorted({h for p in pairs for h in p})
    hmax = hs[-1]
    s_max = math.sqrt(2 * L)

    def off_radius(h):
        return spec.implied_constant * math.sqrt(h * math.log(spec.ell) / (L * spec.ell))

    norm_max = math.sqrt(hmax / L)
    qd, mu, bound = ellipsoid_form(g, [("diag", norm_max * s_max), ("off", off_radius(hmax) * s_max)])
    pts, nodes = _kernels.ellipsoid_points(qd, mu, bound, spec.max_nodes)
    if nodes < 0:
        raise ResourceGuardExceeded(f"lattice walk passed {spec.max_nodes} nodes")
    # |t| <= sqrt 2 ||x|| and ||x|| <= sqrt(2L) sqrt(H/L)
    ts = _gauss_disc(math.sqrt(2) * norm_max * s_max * (1 + _SLACK))
    e_all = pts[:, 0] + 1j * pts[:, 1]
    bc_all = (pts[:, 2] + 1j * pts[:, 3]) * (pts[:, 4] + 1j * pts[:, 5])
    keys, fros, dds = [], [], []
    for start in range(0, len(pts), 256):
        e = e_all[start:start + 256, None]
        bc = bc_all[start:start + 256, None]
        blk = pts[start:start + 256]
        t = ts[None, :]
        # t = e mod 2 makes (t^2 - e^2)/4 integral
        ok = ((t.real - e.real) % 2 == 0) & ((t.imag - e.imag) % 2 == 0)
        n = (t * t - e * e) / 4 - bc
        nn = n.real ** 2 + n.imag ** 2
        ok &= (nn >= L * L) & (nn <= 4 * L * L)
        iv, it = np.nonzero(ok)
        if not len(iv):
            continue
        tv, ev = ts[it], e_all[start + iv]
        rows = np.stack([((tv + ev) / 2).real, ((tv + ev) / 2).imag,
                         blk[iv, 2], blk[iv, 3], blk[iv, 4], blk[iv, 5],
                         ((tv - ev) / 2).real, ((tv - ev) / 2).imag], axis=1).astype(np.int64)
        nv = n[iv, it]
        m = _conjugate(g, rows, np.sqrt(nv))
        keys.append(np.stack([nv.real, nv.imag], axis=1).astype(np.int64))
        fros.append(np.sqrt(_fro2(m)))
        dds.append(_dist_d(m))
    results = [CountResult(spec=replace(spec, H1=x, H2=y), count=0, upper=0, nodes=nodes) for x, y in pairs]
    if not keys:
        return results
    keys = np.concatenate(keys)
    fro, dd = np.concatenate(fros), np.concatenate(dds)
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = inv.ravel()
    tally = {}
    for h in hs:
        lo, hi = _both(_le(fro, math.sqrt(h / L)), _le(dd, off_radius(h)))
        tally[h] = (np.bincount(inv, lo, len(uniq)).astype(np.int64),
                    np.bincount(inv, hi, len(uniq)).astype(np.int64))
    for r, (x, y) in zip(results, pairs):
        lo = tally[x][0] * tally[y][0]
        hi = tally[x][1] * tally[y][1]
        r.count, r.upper = int(lo.sum()), int(hi.sum())
        r.per_n = {GaussInt(int(k[0]), int(k[1])): int(v) for k, v in zip(uniq, lo) if v}
    return results


# -- Gamma_n in a ball --------------------------------------------------------

def _ball_rows(n: GaussInt, R: float, g: Mat2C, max_nodes: int = 0):
    # ||Y|| <= ||x|| since ||x||^2 = |t|^2/2 + ||Y||^2
    rows, _ = _solutions(n, g, [("full", R)], max_nodes)
    if not len(rows):
        return rows, np.zeros(0, bool), np.zeros(0, bool)
    m = _conjugate(g, rows, cmath.sqrt(complex(n)))
    lo, hi = _le(np.sqrt(_fro2(m)), R)
    return rows, lo, hi


def _to_matrices(rows: np.ndarray):
    return [((GaussInt(int(r[0]), int(r[1])), GaussInt(int(r[2]), int(r[3]))),
             (GaussInt(int(r[4]), int(r[5])), GaussInt(int(r[6]), int(r[7])))) for r in rows]


def enumerate_gamma_n(n, R: float, g=None) -> list:
    """All gamma with det gamma = n and ||g^-1 gamma g / sqrt n|| <= R.

    Matrices are ((a, b), (c, d)) tuples of GaussInt.  Ties within the
    guard band are kept.
    """
    n = GaussInt.of(n)
    if not n:
        raise ValueError("n must be nonzero")
    g = Mat2C.identity() if g is None else Mat2C.of(g)
    rows, _, hi = _ball_rows(n, R, g)
    return _to_matrices(rows[hi]) if len(rows) else []


def count_gamma_n(n, R: float, g=None) -> tuple[int, int]:
    """[lower, upper] size of the enumerate_gamma_n set."""
    n = GaussInt.of(n)
    g = Mat2C.identity() if g is None else Mat2C.of(g)
    rows, lo, hi = _ball_rows(n, R, g)
    return int(lo.sum()), int(hi.sum())


def _disc(B: float) -> list[GaussInt]:
    r = int(math.floor(B))
    return [GaussInt(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1) if x * x + y * y <= B * B]


def enumerate_gamma_n_bruteforce(n, R: float, g=None, order: str = "acb") -> list:
    """Reference scan: entries bounded by ||g|| ||g^-1|| R sqrt|n|, d solved by divisibility.

    Only for small inputs; `order` permutes the three entry loops.
    """
    n = GaussInt.of(n)
    g = Mat2C.identity() if g is None else Mat2C.of(g)
    B = frobenius_norm(g) * frobenius_norm(g.inv()) * R * math.sqrt(abs(complex(n))) * (1 + _SLACK)
    disc = _disc(B)
    sqrt_n = cmath.sqrt(complex(n))
    gi = g.inv()
    found = set()

    def accept(a, b, c, d):
        gam = Mat2C(complex(a), complex(b), complex(c), complex(d))
        m = (gi @ gam @ g) * (1 / sqrt_n)
        return frobenius_norm(m) <= R + GUARD * max(1.0, R)

    import itertools
    for combo in itertools.product(disc, repeat=3):
        ent = dict(zip(order, combo))
        a, b, c = ent["a"], ent["b"], ent["c"]
        if a:
            d = (n + b * c).exact_div(a)
            if d is not None and accept(a, b, c, d):
                found.add(((a, b), (c, d)))
        elif b and c and -(b * c) == n:
            # a = 0: d is free
            for d in disc:
                if accept(a, b, c, d):
                    found.add(((a, b), (c, d)))
    return sorted(found)


def straightforward_fit(g, Rs, ns) -> dict:
    """Least-squares exponents of log #{gamma : ||.|| <= R} in log R and log |n|."""
    g = Mat2C.of(g)
    rows = []
    for n in ns:
        n = GaussInt.of(n)
        for R in Rs:
            lo, _ = count_gamma_n(n, R, g)
            rows.append((math.log(R), 0.5 * math.log(norm(n)), math.log(max(lo, 1)), n, R, lo))
    X = np.array([[1.0, r[0], r[1]] for r in rows])
    y = np.array([r[2] for r in rows])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return {"const": float(coef[0]), "exp_R": float(coef[1]), "exp_n": float(coef[2]),
            "samples": [(str(r[3]), r[4], r[5]) for r in rows]}


# -- Hecke cosets -------------------------------------------------------------

def hecke_coset_reps(n) -> list:
    """[[a, b], [0, d]] with ad = n, a normalized, b over residues mod d."""
    n = GaussInt.of(n)
    if not n:
        raise ValueError("n must be nonzero")
    zero = GaussInt(0)
    return [((a, b), (zero, d)) for a, d in divisor_pairs(n, unit_reduced=True) for b in residues_mod(d)]


def orbit_canonical(mat) -> tuple[GaussInt, GaussInt, GaussInt]:
    """Representative (a, b, d) of the orbit SL2(Z[i]) gamma, in the form used by hecke_coset_reps."""
    (a, b), (c, d) = [[GaussInt.of(x) for x in row] for row in mat]
    # row operations of determinant 1 until the first column is (gcd, 0)
    while c:
        q, r = a.divmod(c)
        a, b, c, d = c, d, -r, -(b - q * d)
    if not a:
        raise ValueError("singular matrix")
    a2 = normalize(a)
    u = a2.exact_div(a)
    a, b, d = a2, b * u, d.exact_div(u)
    return a, reduce_mod(b, d), d


def _mat_mul(x, y):
    (a, b), (c, d) = x
    (e, f), (g, h) = y
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def hecke_product_orbits(m, n) -> tuple[Counter, Counter]:
    """Orbit multisets of {beta alpha} and of the right side of the Hecke multiplication rule.

    The right side lists d * Gamma_{mn/d^2} with multiplicity N(d) for (d) | (m, n).
    """
    m, n = GaussInt.of(m), GaussInt.of(n)
    lhs = Counter(orbit_canonical(_mat_mul(b, a)) for a in hecke_coset_reps(m) for b in hecke_coset_reps(n))
    rhs: Counter = Counter()
    mn = m * n
    common = [d for d, _ in divisor_pairs(m, unit_reduced=True) if n.exact_div(d) is not None]
    zero = GaussInt(0)
    for d in common:
        k = mn.exact_div(d * d)
        for (a, b), (_, dd) in hecke_coset_reps(k):
            rhs[orbit_canonical(((a * d, b * d), (zero, dd * d)))] += norm(d)
    return lhs, rhs


# -- lemma conformance --------------------------------------------------------

@dataclass(frozen=True)
class SubBound:
    name: str
    regime: Regime
    predicate: Predicate
    part: str  # "total", "pp" or "np"


def _sub_bounds(lemma_id: str) -> list[SubBound]:
    R, P = Regime, Predicate
    table = {
        "counting-for-thm1": [("Mbound1", R.UNIT, "total"), ("Mbound2-mid", R.MID, "pp"),
                              ("Mbound2-high", R.HIGH, "pp"), ("Mbound3", R.MID, "np"),
                              ("Mbound4", R.HIGH, "np")],
        "first-moment-count-lemma": [("Nbound1", R.UNIT, "total"), ("Nbound2", R.MID, "total"),
                                     ("Nbound3", R.HIGH, "total")],
        "counting-for-thm2": [("Rbound1", R.UNIT, "total"), ("Rbound2-mid", R.MID, "pp"),
                              ("Rbound2-high", R.HIGH, "pp"), ("Rbound3", R.MID, "total"),
                              ("Rbound4", R.HIGH, "np")],
        "lemma-ell-count": [("Qbound", R.UNIT, "total")],
    }
    pred = {"counting-for-thm1": P.THM1_M, "first-moment-count-lemma": P.M_D,
            "counting-for-thm2": P.M_STAR_0, "lemma-ell-count": P.Q_PAIRS}
    if lemma_id not in table:
        raise ValueError(f"unknown lemma {lemma_id!r}")
    return [SubBound(name, reg, pred[lemma_id], part) for name, reg, part in table[lemma_id]]


LEMMAS = ("counting-for-thm1", "first-moment-count-lemma", "counting-for-thm2", "lemma-ell-count")


def lemma_bound(name: str, L: float, d1: float, d2: float, ell: float = 1e6) -> float:
    """Right-hand side of each bound with every implied constant set to 1.

    Single-radius bounds read d1; Qbound reads (d1, d2) as (H1, H2).
    """
    mid, high = float(L) ** 2, float(L) ** 4
    r = math.sqrt(ell)
    table = {
        "Mbound1": lambda: 1.0,
        "Mbound2-mid": lambda: mid ** 0.5 + mid * d2 ** 2,
        "Mbound2-high": lambda: high ** 0.5 + high * d2 ** 2,
        "Mbound3": lambda: L ** 4 * d1 ** 4 * (d1 ** 2 + d2 ** 2),
        "Mbound4": lambda: L ** 6 * d1 ** 4 * (d1 ** 2 + d2 ** 2),
        "Nbound1": lambda: 1.0,
        "Nbound2": lambda: L ** 2 + L ** 4 * d1 ** 4,
        "Nbound3": lambda: L ** 2 + L ** 6 * d1 ** 4,
        "Rbound1": lambda: 1.0,
        "Rbound2-mid": lambda: mid ** 0.5 + mid * d1 ** 2,
        "Rbound2-high": lambda: high ** 0.5 + high * d1 ** 2,
        "Rbound3": lambda: (L ** 1.5 + L ** 3 * d1 ** 3 + (L ** 2 + L ** 3.5 * d1 ** 2) / r
                            + L ** 4 * d1 ** 2 / ell),
        "Rbound4": lambda: L ** 3 + L ** 5 * d1 ** 2 + (L ** 4 + L ** 6 * d1 ** 2) / r,
        "Qbound": lambda: d1 * d2,
    }
    if name not in table:
        raise ValueError(name)
    return table[name]()


@dataclass
class ScanRow:
    lemma_id: str
    bound_name: str
    L: float
    regime: str
    delta1: float
    delta2: float
    sample: int
    count: int
    upper: int
    bound: float
    ratio: float


@dataclass
class Growth:
    bound_name: str
    C: float
    max_ratio: dict
    ok: bool


@dataclass
class LemmaReport:
    lemma_id: str
    rows: list
    growth: list
    vanishing: list = field(default_factory=list)
    identity_failures: int = 0
    wall_time: float = 0.0

    @property
    def vanishing_ok(self) -> bool:
        return all(v["nonparabolic_upper"] == 0 for v in self.vanishing)

    @property
    def growth_ok(self) -> bool:
        return all(gr.ok for gr in self.growth)

    @property
    def ok(self) -> bool:
        return self.vanishing_ok and self.growth_ok and self.identity_failures == 0


def vanishing_threshold(L: float, regime: Regime) -> float:
    """delta1 below which the non-parabolic count is claimed to vanish: big_l^(-1/4) / 2."""
    return (float(L) ** regime.value) ** -0.25 / 2


def _grid_for(delta_grid, regime: Regime):
    if isinstance(delta_grid, dict):
        return list(delta_grid.get(regime.name, delta_grid.get(regime, [])))
    return list(delta_grid)


def _scan_task(args):
    lemma_id, regime, L, idx, g, pairs, vanish, extra = args
    subs = [sb for sb in _sub_bounds(lemma_id) if sb.regime is regime]
    pred = subs[0].predicate
    spec = CountSpec(g=g, L=L, regime=regime, predicate=pred, **extra)
    res = count_grid(spec, list(pairs) + list(vanish))
    rows = []
    for sb in subs:
        for (d1, d2), r in zip(pairs, res):
            if sb.part == "pp":
                lo, hi = r.parabolic, r.parabolic_upper
            elif sb.part == "np":
                lo, hi = r.nonparabolic, r.nonparabolic_upper
            else:
                lo, hi = r.count, r.upper
            bound = lemma_bound(sb.name, L, d1, d2, spec.ell)
            rows.append(ScanRow(lemma_id, sb.name, L, regime.name, d1, d2, idx, lo, hi, bound, hi / bound))
    van = [{"L": L, "regime": regime.name, "delta1": d1, "delta2": d2, "sample": idx,
            "nonparabolic": r.nonparabolic, "nonparabolic_upper": r.nonparabolic_upper}
           for (d1, d2), r in zip(vanish, res[len(pairs):])]
    bad = res[0].identity_failures if res else 0
    return rows, van, bad


def _run(fn, tasks, jobs: int):
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(jobs) as ex:
        return list(ex.map(fn, tasks, chunksize=1))


def growth_check(rows, bound_names, L_grid, exponent: float = 0.3) -> list[Growth]:
    """max ratio per L against C L^exponent, with C fitted at the smallest L."""
    out = []
    base = min(L_grid)
    for name in bound_names:
        by_l = {L: 0.0 for L in sorted(L_grid)}
        for r in rows:
            if r.bound_name == name:
                by_l[r.L] = max(by_l[r.L], r.ratio)
        C = by_l[base] / base ** exponent
        ok = all(v <= C * L ** exponent * (1 + 1e-12) for L, v in by_l.items())
        out.append(Growth(name, C, by_l, ok))
    return out


def verify_lemma(lemma_id: str, g_samples, L_grid, delta_grid, *, jobs: int = 1,
                 growth_exponent: float = 0.3, vanish_fractions=(0.5, 0.9), extra=None) -> LemmaReport:
    """Scan count/bound over the grid and compare the growth in L with C L^growth_exponent.

    delta_grid is a list of (delta1, delta2) pairs, or a dict keyed by regime
    name; single-radius lemmas read delta1 only.  For lemma-ell-count the
    pairs are (H1/L, H2/L).  For counting-for-thm1 the scan also tests the
    non-parabolic vanishing at vanish_fractions of the threshold, for every
    delta2 in the grid.
    """
    t0 = time.perf_counter()
    extra = dict(extra or {})
    gs = [Mat2C.of(g) for g in g_samples]
    Ls = sorted(L_grid)
    subs = _sub_bounds(lemma_id)
    tasks = []
    for regime in dict.fromkeys(sb.regime for sb in subs):
        grid = _grid_for(delta_grid, regime)
        for L in Ls:
            if subs[0].predicate is Predicate.Q_PAIRS:
                pairs = [(h1 * L, h2 * L) for h1, h2 in grid]
            elif lemma_id == "counting-for-thm1":
                pairs = list(dict.fromkeys(grid))
            else:
                pairs = list(dict.fromkeys((d1, d1) for d1, _ in grid))
            vanish = []
            if lemma_id == "counting-for-thm1":
                thr = vanishing_threshold(L, regime)
                vanish = [(f * thr, d2) for f in vanish_fractions for d2 in sorted({p[1] for p in grid})]
            for idx, g in enumerate(gs):
                tasks.append((lemma_id, regime, L, idx, g, tuple(pairs), tuple(vanish), extra))
    out = _run(_scan_task, tasks, jobs)
    rows = [r for o in out for r in o[0]]
    rows.sort(key=lambda r: (r.bound_name, r.L, r.delta1, r.delta2, r.sample))
    report = LemmaReport(lemma_id, rows, growth_check(rows, [sb.name for sb in subs], Ls, growth_exponent))
    report.vanishing = sorted((v for o in out for v in o[1]),
                              key=lambda v: (v["L"], v["regime"], v["delta1"], v["delta2"], v["sample"]))
    report.identity_failures = sum(o[2] for o in out)
    report.wall_time = time.perf_counter() - t0
    return report
