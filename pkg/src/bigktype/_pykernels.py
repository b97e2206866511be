"""Pure-Python/numpy versions of the kernels in _core.pyx.

Semantics are identical; _kernels picks whichever is importable.
"""
from __future__ import annotations

import numpy as np


def _jacobi_0b(n: int, b: int, x: np.ndarray) -> np.ndarray:
    # P_n^(0,b)(x); same recurrence as su2rep.jacobi_poly with alpha = 0
    p0 = np.ones_like(x)
    if n == 0:
        return p0
    p1 = 1 + (b + 2) * (x - 1) / 2
    for k in range(2, n + 1):
        c = 2 * k + b
        a1 = 2 * k * (k + b) * (c - 2)
        a2 = -(c - 1) * b * b
        a3 = (c - 1) * c * (c - 2)
        a4 = 2 * (k - 1) * (k + b - 1) * c
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1
    return p1


def trace_sum(g, l2: int, p2: int, nu: complex, alpha, beta, weights) -> complex:
    """Sum over nodes k = k[alpha, beta] of weight * (2l+1) Phi_{p,p}(kappa(k^-1 g k)) * t^(2nu-2).

    t^2 = |a'|^2 + |c'|^2 where (a', c') is the first column of g k.
    """
    ga, gb, gc, gd = g
    mbc = -np.conj(beta)
    a1 = ga * alpha + gb * mbc
    c1 = gc * alpha + gd * mbc
    t2 = a1.real ** 2 + a1.imag ** 2 + c1.real ** 2 + c1.imag ** 2
    t = np.sqrt(t2)
    al = (np.conj(alpha) * a1 - beta * c1) / t
    m = abs(p2)
    if m == l2:
        core = np.conj(al) ** m if p2 >= 0 else al ** m
    else:
        x = np.minimum(2 * (al.real ** 2 + al.imag ** 2) - 1, 1.0)
        base = np.conj(al) if p2 >= 0 else al
        core = (base ** m) * _jacobi_0b((l2 - m) // 2, m, x)
    fac = np.exp((nu - 1) * np.log(t2))
    return complex((l2 + 1) * np.dot(weights, core * fac))


def trace_sum_batch(gs, l2: int, p2: int, nu: complex, alpha, beta, weights) -> np.ndarray:
    return np.array([trace_sum(g, l2, p2, nu, alpha, beta, weights) for g in gs])


def dirichlet_line(logs, coefs, sigma: float, t0: float, dt: float, n: int) -> np.ndarray:
    """S_j = sum_k coefs_k exp(-(sigma + i (t0 + j dt)) logs_k) for j < n."""
    logs = np.asarray(logs, dtype=float)
    amp = np.asarray(coefs, dtype=float) * np.exp(-sigma * logs)
    T = t0 + np.arange(n) * dt
    out = np.empty(n, dtype=complex)
    chunk = max(1, 2_000_000 // max(1, logs.size))
    for i in range(0, n, chunk):
        out[i:i + chunk] = np.exp(-1j * np.outer(T[i:i + chunk], logs)) @ amp
    return out


def _isqrt(v: np.ndarray) -> np.ndarray:
    s = np.floor(np.sqrt(np.maximum(v, 0).astype(float))).astype(np.int64)
    s = np.where(s * s > v, s - 1, s)
    s = np.where((s + 1) * (s + 1) <= v, s + 1, s)
    return s


def ellipsoid_points(qdiag, mu, bound: float, max_nodes: int = 0):
    """Fincke-Pohst walk; the innermost coordinate is expanded with numpy."""
    qdiag = np.asarray(qdiag, dtype=float)
    mu = np.asarray(mu, dtype=float)
    dim = len(qdiag)
    out = []
    nodes = 0
    x = np.zeros(dim, dtype=np.int64)

    def level(i, part):
        nonlocal nodes
        centre = -float(mu[i, i + 1:] @ x[i + 1:])
        r = np.sqrt(max(bound - part, 0.0) / qdiag[i])
        lo, hi = int(np.ceil(centre - r)), int(np.floor(centre + r))
        if i == 0:
            if hi < lo:
                return True
            col = np.arange(lo, hi + 1, dtype=np.int64)
            block = np.repeat(x[None, :], len(col), axis=0)
            block[:, 0] = col
            nodes += len(col)
            out.append(block)
            return not (max_nodes and nodes > max_nodes)
        for xi in range(lo, hi + 1):
            x[i] = xi
            if not level(i - 1, part + qdiag[i] * (xi - centre) ** 2):
                return False
        x[i] = 0
        return True

    finished = level(dim - 1, 0.0)
    pts = np.concatenate(out) if out else np.zeros((0, dim), dtype=np.int64)
    return pts, (nodes if finished else -nodes)


def det_points(qdiag, mu, bound: float, nr: int, ni: int, max_nodes: int = 0):
    pts, nodes = ellipsoid_points(qdiag, mu, bound, max_nodes)
    if nodes < 0:
        return np.zeros((0, 8), dtype=np.int64), nodes
    er, ei, br, bi, cr, ci = pts.T
    dr = er * er - ei * ei + 4 * (br * cr - bi * ci) + 4 * nr
    di = 2 * er * ei + 4 * (br * ci + bi * cr) + 4 * ni
    nn = dr * dr + di * di
    s = _isqrt(nn)
    ok = (s * s == nn) & ((s + dr) % 2 == 0)
    p = _isqrt((s + dr) // 2)
    q = _isqrt((s - dr) // 2)
    q = np.where(di < 0, -q, q)
    ok &= (p * p - q * q == dr) & (2 * p * q == di)
    ok &= ((p + er) % 2 == 0) & ((q + ei) % 2 == 0)
    rows = []
    for sgn in (-1, 1):
        keep = ok if sgn == -1 else ok & ((p != 0) | (q != 0))
        tp, tq = sgn * p[keep], sgn * q[keep]
        e0, e1 = er[keep], ei[keep]
        rows.append(np.stack([(tp + e0) // 2, (tq + e1) // 2, br[keep], bi[keep],
                              cr[keep], ci[keep], (tp - e0) // 2, (tq - e1) // 2], axis=1))
    return np.concatenate(rows), nodes
