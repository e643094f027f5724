"""The twelve acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (visible with ``pytest -s``
and collected in the terminal summary by conftest).
"""
from __future__ import annotations

import time

import numpy as np
import pytest

from eqym import suites
from eqym.equivariance import EXPECTED_SO, EXPECTED_SOPQ, GAP_MIN, fixed_space
from eqym.lie import Signature, euclidean

pytestmark = pytest.mark.acceptance


def report(record, number: int, ok: bool, text: str):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'} {text}"
    print(line)
    record(line)
    assert ok, line


def test_c01_classification_dimensions(acceptance_log):
    t0 = time.perf_counter()
    got, gaps = {}, []
    for n in EXPECTED_SO:
        rep = fixed_space(euclidean(n))
        got[f"so({n})"] = (rep.dimension, EXPECTED_SO[n])
        gaps.append(rep.gap_ratio)
    for (p, q), d in EXPECTED_SOPQ.items():
        rep = fixed_space(Signature(p, q))
        got[f"so+({p},{q})"] = (rep.dimension, d)
        gaps.append(rep.gap_ratio)
    elapsed = time.perf_counter() - t0
    # (1,1): the printed case text names R (x) so(1,1) as one generator; the space is 2-dimensional
    assert got["so+(1,1)"][0] == 2
    ok = all(a == b for a, b in got.values()) and min(gaps) >= GAP_MIN and elapsed < 10
    report(acceptance_log, 1, ok, f"dimensions match for {len(got)} cases, min gap {min(gaps):.2e}, "
                                  f"{elapsed:.2f}s")


def test_c02_closed_form_bases(acceptance_log):
    r = suites.closed_forms()
    report(acceptance_log, 2, r.passed, f"max principal angle {r.value:.2e} (< 1e-7)")


def test_c03_commutator_tables(acceptance_log):
    r = suites.commutators()
    tables = r.detail["tables"]
    assert {"so4", "sun(4)", "sun(5)", "sun(6)", "sopq(3,3)"} <= set(tables)
    report(acceptance_log, 3, r.passed, f"{sum(len(t) for t in tables.values())} identity families over "
                                        f"{len(tables)} algebras, max residual {r.value:.2e} (< 1e-10)")


def test_c04_equivariance_and_negative_control(acceptance_log):
    good = suites.equivariance(samples=100)
    bad = suites.equivariance(samples=10, corrupt=True)
    weakest = min(bad.detail.values())
    ok = good.passed and weakest > 1e-3 and not bad.passed
    report(acceptance_log, 4, ok, f"max residual {good.value:.2e} (< 1e-9) over {len(good.detail)} cases; "
                                  f"corrupted min {weakest:.2e} (> 1e-3)")


def test_c05_curvature_closed_vs_fd(acceptance_log):
    r = suites.curvature(points=20, step=1e-5)
    report(acceptance_log, 5, r.passed, f"max relative error {r.value:.2e} (< 1e-6) over {len(r.detail)} cases")


def test_c06_reduction_equivalence(acceptance_log):
    r = suites.projection(samples=20)
    labels = set(r.detail)
    assert {"SON(n=5)", "SON(n=6)", "SO4(n=4)", "SOPQ4(p=1,q=3)", "SOPQ4(p=2,q=2)", "ISO-SON(n=5)",
            "SUN-H(n=4)"} <= labels
    report(acceptance_log, 6, r.passed, f"max relative mismatch {r.value:.2e} (< 1e-8)")


def test_c07_solver_self_consistency(acceptance_log):
    r = suites.solver(points=20)
    d = r.detail
    ok = d["ym_residual"] < 1e-7 and d["so4_vs_son4"] < 1e-10
    report(acceptance_log, 7, ok, f"full YM residual {d['ym_residual']:.2e} (< 1e-7); "
                                  f"SO4 f=0 vs SOn n=4 {d['so4_vs_son4']:.2e} (< 1e-10)")


def test_c08_hodge(acceptance_log):
    r = suites.hodge()
    report(acceptance_log, 8, r.passed, f"sign law {r.detail['sign_law']:.1e}, path residual "
                                        f"{max(r.detail['path'].values()):.2e} (< 1e-8)")


def test_c09_wave_energy_and_convergence(acceptance_log):
    r = suites.wave(N=2048, conv_N=256)
    d = r.detail
    ok = d["drift"] < 1e-5 and abs(d["convergence"]["factor"] - 4) <= 0.5
    report(acceptance_log, 9, ok, f"energy drift {d['drift']:.2e} (< 1e-5); convergence factor "
                                  f"{d['convergence']['factor']:.3f} (4 +- 0.5)")


def test_c10_scaling_law(acceptance_log):
    r = suites.scaling()
    assert set(r.detail) == {"n=4,lam=0.5", "n=4,lam=2.0", "n=5,lam=0.5", "n=5,lam=2.0"}
    report(acceptance_log, 10, r.passed, f"max relative deviation from lam^(n-4) {r.value:.2e} (< 1e-6)")


def test_c11_exact_solutions(acceptance_log):
    r = suites.fixed_points()
    report(acceptance_log, 11, r.passed, f"max residual {r.value:.2e} for constant and static data")


def test_c12_spin_lift(acceptance_log):
    r = suites.spin()
    d = r.detail
    ok = d["roundtrip"] <= 1e-13 and d["inflation"] < 10
    report(acceptance_log, 12, ok, f"roundtrip {d['roundtrip']:.1e} (<= 1e-13); inflation "
                                   f"{d['inflation']:.2f} (< 10)")


def test_acceptance_suite_matches_numpy_determinism():
    # same seed, same numbers: the suites are reproducible
    a = suites.projection([("SON", {"n": 5})], samples=3, seed=7).value
    b = suites.projection([("SON", {"n": 5})], samples=3, seed=7).value
    assert a == b and np.isfinite(a)
