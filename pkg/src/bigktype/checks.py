"""Named numerical checks with measured values and thresholds.

Each function returns a list of Check records.  The CLI suites and the
acceptance tests both call these, so the numbers in a JSON report and in a
test failure are the same numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mat2c import Mat2C, cartan, k_matrix, random_k, random_sl2


@dataclass
class Check:
    name: str
    measured: float
    threshold: float
    passed: bool
    # how measured compares with threshold when passing
    relation: str = "<="

    def as_dict(self) -> dict:
        return {"name": self.name, "measured": self.measured, "threshold": self.threshold,
                "pass": bool(self.passed)}


def below(name: str, measured: float, threshold: float) -> Check:
    measured = float(measured)
    return Check(name, measured, float(threshold), bool(measured <= threshold), "<=")


def above(name: str, measured: float, threshold: float) -> Check:
    measured = float(measured)
    return Check(name, measured, float(threshold), bool(measured >= threshold), ">=")


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def sample_g(n: int, seed: int, max_norm: float = 3.0) -> list[Mat2C]:
    rng = np.random.default_rng(seed)
    return [random_sl2(rng, max_norm) for _ in range(n)]


# -- K-analysis and trace functions ---------------------------------------------

def haar_normalization(n: int = 16) -> list[Check]:
    from .su2rep import haar_grid

    grid = haar_grid(n, n, n)
    one = grid.integrate(lambda a, b: np.ones_like(a.real))
    # |alpha|^2 has mean 1/2 under Haar measure
    second = grid.integrate(lambda a, b: np.abs(a) ** 2)
    return [below("haar.integral_of_one", abs(one - 1), 1e-12),
            below("haar.second_moment", abs(second - 0.5), 1e-12)]


def identity_values(ell_max: int = 16, nus=(0, 1j, 2j), literal_ell_max: int = 3) -> list[Check]:
    """phi(id) = 2l+1 for every p, and the torus average at +-id equals 1.

    The averages use the reduced route for every (l, q); the literal torus
    average of the trace integral is run for l <= literal_ell_max.
    """
    from .sphtrace import SpectralParam, phi_avg, phi_avg_reduced, phi_trace

    ident = Mat2C.identity()
    worst = 0.0
    for ell in range(1, ell_max + 1):
        for nu in nus:
            for p in range(-ell, ell + 1):
                worst = max(worst, _rel(phi_trace(SpectralParam(nu, p, ell), ident), 2 * ell + 1))
    avg = lit = 0.0
    for sign in (1, -1):
        g = ident * sign
        cf = cartan(g)
        for ell in range(0, ell_max + 1):
            for q in range(-ell, ell + 1):
                avg = max(avg, abs(phi_avg_reduced(ell, 0, q, cf) - 1))
                if ell <= literal_ell_max:
                    lit = max(lit, abs(phi_avg(0, ell, q, g) - 1))
    return [below("identity.phi_trace_rel", worst, 1e-8),
            below("identity.phi_avg_reduced_abs", avg, 1e-8),
            below("identity.phi_avg_literal_abs", lit, 1e-8)]


def wang_symmetry(ell_max: int = 6, n_g: int = 20, seed: int = 0,
                  pairs=((2, 1), (3, 1), (3, 2))) -> list[Check]:
    from .sphtrace import SpectralParam, phi_trace

    worst = 0.0
    for g in sample_g(n_g, seed):
        for nu, p in pairs:
            for ell in range(max(nu, p), ell_max + 1):
                a = phi_trace(SpectralParam(nu, p, ell), g)
                b = phi_trace(SpectralParam(p, nu, ell), g)
                worst = max(worst, abs(a - b) / (1 + abs(a)))
    return [below("symmetry.wang", worst, 1e-5)]


def conjugation_invariance(ell: int = 4, n_g: int = 10, seed: int = 0) -> list[Check]:
    """phi(k g k^-1) = phi(g) and phi(g^-1) = phi(g) on random g, k."""
    from .sphtrace import SpectralParam, phi_trace

    rng = np.random.default_rng(seed + 1)
    conj = inv = 0.0
    for g in sample_g(n_g, seed):
        k = random_k(rng)
        for p in range(-ell, ell + 1):
            par = SpectralParam(0.7j, p, ell)
            base = phi_trace(par, g)
            conj = max(conj, abs(phi_trace(par, k @ g @ k.inv()) - base) / (1 + abs(base)))
            inv = max(inv, abs(phi_trace(par, g.inv()) - base) / (1 + abs(base)))
    return [below("symmetry.conjugation", conj, 1e-8), below("symmetry.inverse", inv, 1e-8)]


def three_routes(n_g: int = 50, seed: int = 0, ell_reduced: int = 10, ell_top: int = 40) -> list[Check]:
    """Torus average by the literal route against the reduced and the q = l routes.

    Sample i uses l = 1 + i mod ell_reduced (all q) for the reduced
    comparison and l = 1 + i mod ell_top for the q = l one.
    """
    from .sphtrace import phi_avg, phi_avg_reduced, phi_avg_top

    red = top = 0.0
    for i, g in enumerate(sample_g(n_g, seed)):
        cf = cartan(g)
        ell = 1 + i % ell_reduced
        for q in range(-ell, ell + 1):
            red = max(red, _rel(phi_avg(0, ell, q, g), phi_avg_reduced(ell, 0, q, cf)))
        ell = 1 + i % ell_top
        top = max(top, abs(phi_avg(0, ell, ell, g) - phi_avg_top(ell, 0, cf)))
    return [below("routes.reduced_rel", red, 1e-6), below("routes.top_abs", top, 1e-8)]


# -- Figure 1 ---------------------------------------------------------------------

def figure1_data(ell: int = 120, q_list=(120, 100, 20, 0), n_points: int = 601) -> dict:
    """{q: (v, value)} for the restriction of the q-average to K, v in [0, pi]."""
    from .su2rep import restriction_profile

    if ell > 200:
        raise ValueError("l <= 200")
    v = np.linspace(0.0, math.pi, n_points)
    out = {}
    for q in q_list:
        if not 0 <= q <= ell:
            raise ValueError(f"q = {q} outside [0, l]")
        out[q] = (v, restriction_profile(2 * ell, 2 * q, v))
    return out


def figure1(ell: int = 120, cross_ell: int = 40, n_points: int = 601) -> list[Check]:
    from .su2rep import wigner_phi

    data = figure1_data(ell, (ell, 100 * ell // 120, 20 * ell // 120, 0), n_points)
    v, top = data[ell]
    mid = (v >= 0.3) & (v <= math.pi - 0.3)
    _, zero = data[0]
    half = int(np.argmin(np.abs(v - math.pi / 2)))
    at0 = max(abs(vals[0] - 1) for _, vals in data.values())
    qs = (cross_ell, 100 * cross_ell // 120, 20 * cross_ell // 120, 0)
    cross = figure1_data(cross_ell, qs, 121)
    worst = 0.0
    for q, (vv, vals) in cross.items():
        ref = np.array([wigner_phi(cross_ell, q, q, k_matrix(0.0, x, 0.0)) for x in vv])
        worst = max(worst, float(np.max(np.abs(vals - ref))))
    return [below("figure1.top_panel_drop", np.max(np.abs(top[mid])), 1e-10),
            below("figure1.zero_panel_peak", abs(abs(zero[half]) - 1), 1e-9),
            below("figure1.value_at_zero", at0, 1e-12),
            below("figure1.cross_route", worst, 1e-6)]


# -- transform pair ------------------------------------------------------------

def transform_roundtrip(ell_max: int = 4, ts=(0.0, 0.5, 1.0, 1.5, 2.0)) -> list[Check]:
    """forward(inverse(h)) = h on (it, p) for t in ts and p = 0..l."""
    from .sphtransform import forward_transform, gaussian_weight, inverse_function

    worst = 0.0
    for ell in range(1, ell_max + 1):
        h = gaussian_weight(ell)
        f = inverse_function(h, ell)
        for t in ts:
            for p in range(ell + 1):
                worst = max(worst, _rel(forward_transform(f, ell, 1j * t, p), h(1j * t, p)))
    return [below("transform.roundtrip_rel", worst, 1e-3)]


def plancherel(ell_max: int = 6) -> list[Check]:
    from .sphtransform import plancherel_check

    worst = 0.0
    for ell in range(1, ell_max + 1):
        lhs, rhs = plancherel_check(ell)
        worst = max(worst, _rel(lhs, rhs))
    return [below("transform.plancherel_rel", worst, 1e-3)]


def cartan_constant() -> list[Check]:
    from .sphtransform import cartan_measure_calibration

    return [below("transform.cartan_constant_rel", _rel(cartan_measure_calibration(), 4 * math.pi), 1e-3)]


# -- Voronoi kernel -------------------------------------------------------------

def _integer_pairs(n: int, seed: int):
    from .voronoi import SpectralPair

    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        nu1, nu2 = (int(x) for x in rng.integers(-3, 4, 2))
        p1, p2 = (int(x) for x in rng.integers(-3, 4, 2))
        out.append(SpectralPair(nu1, nu2, p1, p2))
    return out


def voronoi_contours() -> list[Check]:
    """Full kernel on three abscissae; the first term on Re s = 3/2, 2, 3 against the lattice sum."""
    from .voronoi import SpectralPair, first_term_contour, first_term_lattice, voronoi_kernel

    pair = SpectralPair(0, 0, 0, 0)
    vals = [voronoi_kernel(1.0, pair, 1.0, contour=c) for c in (0.25, 0.35, 0.6)]
    full = max(abs(a - vals[0]) for a in vals)
    ref = first_term_lattice(1.0)
    first = max(abs(first_term_contour(1.0, c) - ref) for c in (1.5, 2.0, 3.0))
    return [below("voronoi.contour_full", full, 1e-8), below("voronoi.contour_first_term", first, 1e-8)]


def voronoi_symmetries(n_config: int = 20, seed: int = 0, x: float = 1.0) -> list[Check]:
    from .voronoi import voronoi_kernel

    neg = swap = 0.0
    for pair in _integer_pairs(n_config, seed):
        base = voronoi_kernel(x, pair)
        for j in (1, 2):
            neg = max(neg, _rel(voronoi_kernel(x, pair.negated(j)), base))
            swap = max(swap, _rel(voronoi_kernel(x, pair.swapped(j)), base))
    return [below("voronoi.negation", neg, 1e-6), below("voronoi.swap", swap, 1e-6)]


def voronoi_decay(A: float = 3.0) -> list[Check]:
    from .voronoi import SpectralPair, decay_slope

    slope, _ = decay_slope(SpectralPair(0, 0, 0, 0))
    return [below("voronoi.decay_slope", slope, -A + 0.2)]


# -- envelopes ------------------------------------------------------------------

def envelopes(ell_list=(8, 16, 32, 64), n_samples: int = 200, seed: int = 0, jobs: int = 1,
              kinds=("zero", "half", "top", "full")) -> list[Check]:
    """Growth of max |phi| / envelope between consecutive l, and the hard cutoffs."""
    from .sphtrace import default_sampler, envelope_scan

    sampler = default_sampler(n_samples, seed, 5.0)
    out = []
    for kind in kinds:
        scan = envelope_scan(ell_list, kind, sampler, jobs=jobs)
        for a, b, g_obs, g_max, _ in scan.growth:
            out.append(below(f"envelope.{kind}.growth_{a}_{b}", g_obs, g_max))
        if scan.reports[0].theorem in ("thm5a", "thm5b"):
            viol = sum(r.cutoff_violations for r in scan.reports)
            out.append(below(f"envelope.{kind}.cutoff_violations", viol, 0))
    return out


# -- counting -------------------------------------------------------------------

# delta grids per regime; HIGH is capped where the lattice walk gets too large
QUARTERS = (1 / 32, 1 / 16, 1 / 8, 1 / 4)


def counting_grids() -> dict:
    pairs = [(a, b) for a in QUARTERS for b in QUARTERS]
    small = [(a, b) for a in QUARTERS[:3] for b in QUARTERS[:3]]
    single = [(d, d) for d in QUARTERS]
    return {
        "counting-for-thm1": {"UNIT": pairs, "MID": pairs, "HIGH": small},
        "first-moment-count-lemma": {"UNIT": single, "MID": single, "HIGH": single[:2]},
        "counting-for-thm2": {"UNIT": single, "MID": single, "HIGH": single[:2]},
        "lemma-ell-count": {"UNIT": [(a, b) for a in (2, 4, 8) for b in (2, 4, 8)]},
    }


def counting_scan(L_grid, n_g: int = 10, seed: int = 0, jobs: int = 1, lemmas=None):
    """verify_lemma over every lemma; returns {lemma_id: LemmaReport}."""
    from .counting import LEMMAS, verify_lemma

    gs = sample_g(n_g, seed)
    grids = counting_grids()
    return {lid: verify_lemma(lid, gs, L_grid, grids[lid], jobs=jobs) for lid in (lemmas or LEMMAS)}


def counting_checks(reports: dict) -> list[Check]:
    out = []
    for lid, rep in reports.items():
        if rep.vanishing:
            worst = max(v["nonparabolic_upper"] for v in rep.vanishing)
            out.append(below(f"counting.{lid}.vanishing", worst, 0))
        out.append(below(f"counting.{lid}.identity_failures", rep.identity_failures, 0))
        for gr in rep.growth:
            L0 = min(gr.max_ratio)
            # worst ratio of the observed max to C L^0.3
            excess = max((v / (gr.C * L ** 0.3) if gr.C > 0 else (math.inf if v > 0 else 0.0))
                         for L, v in gr.max_ratio.items() if L != L0) if len(gr.max_ratio) > 1 else 0.0
            out.append(below(f"counting.{gr.bound_name}.growth", excess, 1.0 + 1e-12))
    return out


def straightforward(n_g: int = 3, seed: int = 0, Rs=(4.0, 5.0, 6.0, 8.0),
                    ns=(1, 1 + 1j, 2, 2 + 1j, 3)) -> list[Check]:
    """Exponent fit of the ball count; R starts at 4, below which the edge at sqrt 2 inflates the slope."""
    from .counting import straightforward_fit
    from .gaussint import GaussInt

    ns = [GaussInt.of(n) for n in ns]
    eR = en = -math.inf
    for g in sample_g(n_g, seed, 2.0):
        fit = straightforward_fit(g, Rs, ns)
        eR, en = max(eR, fit["exp_R"]), max(en, fit["exp_n"])
    return [below("counting.straightforward.exp_R", eR, 4.3), below("counting.straightforward.exp_n", en, 2.3)]
