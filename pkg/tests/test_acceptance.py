"""Acceptance criteria 1-10, one test each.

Every test records its outcome in conftest.ACCEPTANCE before asserting, so
the terminal summary prints one PASS/FAIL line per criterion even when some
fail.  Thresholds live in bigktype.checks.
"""
import os
import time

import pytest

from bigktype import checks as ck
from bigktype.cli import main
from conftest import ACCEPTANCE

JOBS = os.cpu_count() or 1


def record(num, results, t0):
    bad = [c for c in results if not c.passed]
    worst = ", ".join(f"{c.name}={c.measured:.3g} (thr {c.threshold:.3g})" for c in bad)
    text = f"{len(results) - len(bad)}/{len(results)} checks in {time.perf_counter() - t0:.0f}s"
    ACCEPTANCE[num] = (not bad, text + (f"; failing: {worst}" if bad else ""))
    assert not bad, worst


def test_criterion_01_haar_normalization():
    t0 = time.perf_counter()
    record(1, ck.haar_normalization(), t0)


def test_criterion_02_identity_values():
    t0 = time.perf_counter()
    record(2, ck.identity_values(), t0)


@pytest.mark.slow
def test_criterion_03_wang_symmetry():
    t0 = time.perf_counter()
    record(3, ck.wang_symmetry(), t0)


@pytest.mark.slow
def test_criterion_04_three_routes():
    t0 = time.perf_counter()
    record(4, ck.three_routes(), t0)


def test_criterion_05_figure1():
    t0 = time.perf_counter()
    record(5, ck.figure1(), t0)


@pytest.mark.slow
def test_criterion_06_transform_pair():
    t0 = time.perf_counter()
    record(6, ck.transform_roundtrip() + ck.plancherel() + ck.cartan_constant(), t0)


@pytest.mark.slow
def test_criterion_07_voronoi():
    t0 = time.perf_counter()
    record(7, ck.voronoi_contours() + ck.voronoi_symmetries() + ck.voronoi_decay(), t0)


@pytest.mark.slow
def test_criterion_08_counting():
    t0 = time.perf_counter()
    reports = ck.counting_scan(range(7, 31), n_g=10, seed=0, jobs=JOBS)
    record(8, ck.counting_checks(reports) + ck.straightforward(), t0)


@pytest.mark.slow
def test_criterion_09_envelopes():
    t0 = time.perf_counter()
    record(9, ck.envelopes(n_samples=200, seed=0, jobs=JOBS), t0)


def test_criterion_10_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    runs = [["suite", "symmetries", "--ell", "2", "--samples", "2", "--seed", "3"],
            ["suite", "counting", "--Lmax", "8", "--samples", "2", "--straightforward", "0", "--seed", "7"],
            ["figure1", "--ell", "30", "--points", "61"]]
    mismatched = []
    for i, argv in enumerate(runs):
        outs = []
        for rep in ("a", "b"):
            d = tmp_path / f"{i}{rep}"
            main(argv + ["--out", str(d)])
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        if outs[0] != outs[1] or not outs[0]:
            mismatched.append(" ".join(argv[:2]))
    capsys.readouterr()
    results = [ck.below("determinism.mismatched_runs", len(mismatched), 0)]
    record(10, results, t0)
