"""2x2 complex matrices: decompositions of SL2(C) and distances to its special subsets."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

PARABOLIC_TOL = 1e-8


@dataclass(frozen=True, slots=True)
class Mat2C:
    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def of(cls, g) -> "Mat2C":
        if isinstance(g, Mat2C):
            return g
        m = np.asarray(g, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    @classmethod
    def identity(cls) -> "Mat2C":
        return cls(1, 0, 0, 1)

    @classmethod
    def diag(cls, x, y) -> "Mat2C":
        return cls(x, 0, 0, y)

    def array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __matmul__(self, o: "Mat2C") -> "Mat2C":
        return Mat2C(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                     self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __mul__(self, s) -> "Mat2C":
        return Mat2C(self.a * s, self.b * s, self.c * s, self.d * s)

    __rmul__ = __mul__

    def __sub__(self, o: "Mat2C") -> "Mat2C":
        return Mat2C(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def trace(self) -> complex:
        return self.a + self.d

    def inv(self) -> "Mat2C":
        dt = self.det()
        return Mat2C(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)

    def adjoint(self) -> "Mat2C":
        return Mat2C(self.a.conjugate(), self.c.conjugate(), self.b.conjugate(), self.d.conjugate())


@dataclass(frozen=True)
class EulerAngles:
    u: float
    v: float
    w: float


def k_matrix(u: float, v: float, w: float) -> Mat2C:
    cv, sv = math.cos(v), math.sin(v)
    return Mat2C(cmath.exp(1j * (u + w)) * cv, 1j * cmath.exp(1j * (u - w)) * sv,
                 1j * cmath.exp(-1j * (u - w)) * sv, cmath.exp(-1j * (u + w)) * cv)


def euler_from_k(k: Mat2C) -> EulerAngles:
    """Angles with v in [0, pi/2]; when one of alpha, beta vanishes the free angle is set to 0."""
    alpha, beta = k.a, k.b
    v = math.atan2(abs(beta), abs(alpha))
    s = cmath.phase(alpha) if abs(alpha) > 1e-300 else 0.0
    t = cmath.phase(beta / 1j) if abs(beta) > 1e-300 else s
    if abs(alpha) <= 1e-300:
        s = t
    return EulerAngles((s + t) / 2, v, (s - t) / 2)


def frobenius_norm(g) -> float:
    g = Mat2C.of(g)
    return math.sqrt(abs(g.a) ** 2 + abs(g.b) ** 2 + abs(g.c) ** 2 + abs(g.d) ** 2)


def iwasawa(g) -> tuple[Mat2C, float]:
    """KAN projections: kappa in K and H = log sqrt(|a|^2+|c|^2), so exp(rho(H)) = |a|^2+|c|^2."""
    g = Mat2C.of(g)
    t = math.hypot(abs(g.a), abs(g.c))
    a, c = g.a / t, g.c / t
    return Mat2C(a, -c.conjugate(), c, a.conjugate()), math.log(t)


@dataclass(frozen=True)
class CartanForm:
    k1: EulerAngles
    h: float
    k2: EulerAngles

    def matrices(self) -> tuple[Mat2C, Mat2C, Mat2C]:
        e = math.exp(self.h / 2)
        return k_matrix(*_astuple(self.k1)), Mat2C.diag(e, 1 / e), k_matrix(*_astuple(self.k2))

    def reconstruct(self) -> Mat2C:
        k1, a, k2 = self.matrices()
        return k1 @ a @ k2


def _astuple(e: EulerAngles) -> tuple[float, float, float]:
    return e.u, e.v, e.w


def _to_su2(m: np.ndarray) -> tuple[np.ndarray, complex]:
    c = np.linalg.det(m) ** -0.5
    return m * c, c


def cartan(g) -> CartanForm:
    g = Mat2C.of(g)
    U, s, Vh = np.linalg.svd(g.array())
    h = 2 * math.asinh((s[0] - s[1]) / 2)
    U1, c = _to_su2(U)
    V1 = Vh / c
    return CartanForm(euler_from_k(Mat2C.of(U1)), h, euler_from_k(Mat2C.of(V1)))


@dataclass(frozen=True)
class ConjNormalForm:
    k: Mat2C
    z: complex
    u: complex

    def reconstruct(self) -> Mat2C:
        t = Mat2C(self.z, self.u, 0, 1 / self.z)
        return self.k @ t @ self.k.adjoint()


def conj_normal_form(g) -> ConjNormalForm:
    """g = k [[z, u], [0, 1/z]] k^-1 with k in K and |z| >= 1."""
    g = Mat2C.of(g)
    tr = g.trace()
    if abs(tr - 2) < PARABOLIC_TOL:
        z = 1.0 + 0j
    elif abs(tr + 2) < PARABOLIC_TOL:
        z = -1.0 + 0j
    else:
        disc = cmath.sqrt(tr * tr - 4)
        z = (tr + disc) / 2
        if abs(z) < 1:
            z = (tr - disc) / 2
    r1 = (g.a - z, g.b)
    r2 = (g.c, g.d - z)
    row = r1 if abs(r1[0]) ** 2 + abs(r1[1]) ** 2 >= abs(r2[0]) ** 2 + abs(r2[1]) ** 2 else r2
    e = np.array([-row[1], row[0]], dtype=complex)
    nrm = np.linalg.norm(e)
    e = np.array([1, 0], dtype=complex) if nrm < 1e-14 else e / nrm
    k = Mat2C(e[0], -e[1].conjugate(), e[1], e[0].conjugate())
    u = (k.adjoint() @ g @ k).b
    return ConjNormalForm(k, z, u)


def dist_to_K(g) -> float:
    g = Mat2C.of(g)
    m = math.hypot(abs(g.a + g.d.conjugate()), abs(g.b - g.c.conjugate()))
    return math.sqrt(max(0.0, frobenius_norm(g) ** 2 + 2 - 2 * m))


def dist_to_S(g) -> float:
    g = Mat2C.of(g)
    m = max(abs(g.a.conjugate() + g.d), abs(g.b.conjugate() - g.c))
    return math.sqrt(max(0.0, frobenius_norm(g) ** 2 + 2 - 2 * m))


def dist_to_D(g) -> float:
    """Distance to the diagonal matrices diag(z, 1/z); the radius is found numerically."""
    g = Mat2C.of(g)
    ac, d = g.a.conjugate(), g.d
    base = abs(g.a) ** 2 + abs(g.d) ** 2

    def f(s):
        r = math.exp(s)
        return base + r * r + 1 / (r * r) - 2 * abs(ac * r + d / r)

    grid = np.linspace(-20, 20, 401)
    vals = [f(s) for s in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    best = min(vals[i], res.fun)
    return math.sqrt(max(0.0, abs(g.b) ** 2 + abs(g.c) ** 2 + best))


def big_D(g) -> float:
    g = Mat2C.of(g)
    return abs(abs(g.a) ** 2 - abs(g.d) ** 2) + abs(abs(g.b) ** 2 - abs(g.c) ** 2)


def _n_candidate(x: np.ndarray) -> tuple[Mat2C, Mat2C]:
    r, s, t1, t2, t3, t4 = x
    m = Mat2C(r * cmath.exp(1j * t1), s * cmath.exp(1j * t3),
              s * cmath.exp(1j * t4), r * cmath.exp(1j * t2))
    dt = m.det()
    if abs(dt) < 1e-300:
        return m, m
    m1 = m * (1 / cmath.sqrt(dt))
    return m1, m1 * -1


@dataclass(frozen=True)
class NDistance:
    value: float
    converged: bool
    spread: float


def dist_to_N_report(g, restarts: int = 16, seed: int = 0) -> NDistance:
    """Numerical distance to {|a| = |d|, |b| = |c|, det = 1}.

    Candidates m are rescaled by 1/sqrt(det m), which preserves the modulus
    conditions, so every evaluated point lies on the set and the result is
    a genuine upper bound for the infimum.
    """
    g = Mat2C.of(g)

    def obj(x):
        return min(frobenius_norm(g - m) ** 2 for m in _n_candidate(x))

    rng = np.random.default_rng(seed)
    starts = [np.array([
        (abs(g.a) + abs(g.d)) / 2 + 1e-3, (abs(g.b) + abs(g.c)) / 2 + 1e-3,
        cmath.phase(g.a) if g.a else 0.0, cmath.phase(g.d) if g.d else 0.0,
        cmath.phase(g.b) if g.b else 0.0, cmath.phase(g.c) if g.c else 0.0])]
    scale = max(frobenius_norm(g), 1.0)
    while len(starts) < restarts:
        starts.append(np.concatenate([rng.uniform(0, scale, 2), rng.uniform(-math.pi, math.pi, 4)]))
    finals = []
    for x0 in starts:
        res = minimize(obj, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 6000, "maxfev": 12000})
        finals.append(math.sqrt(max(res.fun, 0.0)))
    finals.sort()
    best = finals[0]
    # agreement among the restarts that reached the best basin
    spread = finals[1] - finals[0] if len(finals) > 1 else 0.0
    return NDistance(best, spread <= 1e-3, spread)


def dist_to_N(g, restarts: int = 16, seed: int = 0) -> float:
    return dist_to_N_report(g, restarts, seed).value


def random_sl2(rng: np.random.Generator, max_norm: float = 3.0) -> Mat2C:
    """k1 a_h k2 with Haar-random k1, k2 and h uniform on [0, hmax], so that ||g|| <= max_norm."""
    # ||k1 a_h k2||^2 = 2 cosh h
    hmax = math.acosh(max_norm ** 2 / 2) if max_norm ** 2 > 2 else 0.0
    h = rng.uniform(0, hmax)
    k1, k2 = random_k(rng), random_k(rng)
    e = math.exp(h / 2)
    return k1 @ Mat2C.diag(e, 1 / e) @ k2


def random_k(rng: np.random.Generator) -> Mat2C:
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    alpha, beta = complex(q[0], q[1]), complex(q[2], q[3])
    return Mat2C(alpha, beta, -beta.conjugate(), alpha.conjugate())


def parse_matrix(text: str) -> Mat2C:
    """'id' or a JSON 2x2 array whose entries are numbers or [re, im] pairs."""
    import json

    if text.strip() in ("id", "identity"):
        return Mat2C.identity()
    rows = json.loads(text)
    ent = [[complex(*e) if isinstance(e, list) else complex(e) for e in row] for row in rows]
    return Mat2C.of(ent)
