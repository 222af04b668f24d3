"""Acceptance criteria 1-11, one test each.

Every test records a PASS/FAIL line with its tolerances; the lines are printed in the
pytest terminal summary and by ``python tests/test_acceptance.py``.  A FAIL here is a
real verdict: the check runs against the formula as displayed and is not relaxed.
"""

import subprocess
import sys
import time

import numpy as np

from affinelie import connection as cx
from affinelie.algebra import aff_r, aff_rn_algebra, gl_gl_printed_report, gl_gl_product, is_left_symmetric
from affinelie.atlas import (F_I, atlas_members, classify, family_product, sample_component, sample_off_variety,
                             variety_residual)
from affinelie.geodesics import (GEODESIC_FAMILIES, GEODESIC_VELOCITIES, completeness_probe, development_residual,
                                 verify_closed_form)
from affinelie.projective import projective_etale_check, sl2_block_rep, trace_zero_subalgebra
from affinelie.reps import all_reps, derivative_residual, etale_check, verify_homomorphism
from affinelie.transforms import (case_algebra, closure_check, paired_products, random_transform,
                                  symplectic_cocycle_search, verify_affinity)

RESULTS = {}


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def _tag(fam, a):
    return fam if a is None else f"{fam}({a:g})"


def test_01_lsa_axioms():
    t0 = time.perf_counter()
    members = atlas_members()
    bad = [_tag(f, a) for f, a, p in members if not is_left_symmetric(p, aff_r(), 1e-12).ok]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 1.0
    record(1, ok, f"tol 1e-12, {len(members)} products, failing {bad}, {dt:.3f} s (< 1 s)")
    assert ok


def test_02_variety():
    rng = np.random.default_rng(2024)
    worst, wrong = 0.0, 0
    for comp in ("I", "II", "III"):
        pts = sample_component(comp, rng, 1000)
        worst = max(worst, max(float(np.max(np.abs(variety_residual(p)))) for p in pts))
        for p in pts:
            tag = classify(p, 1e-9)
            # points with alpha = delta = 0 lie on both I and II and are reported as I
            if not tag or not (tag.component == comp or (comp == "II" and p.alpha == 0)):
                wrong += 1
    off = sample_off_variety(rng, 1000)
    accepted = sum(1 for p in off if classify(p, 1e-9))
    ok = worst <= 1e-12 and wrong == 0 and accepted == 0
    record(2, ok, f"3 x 1000 samples, max residual {worst:.2e} (<= 1e-12), misclassified {wrong}, "
                  f"off-variety accepted {accepted}/1000")
    assert ok


def test_03_representations():
    t0 = time.perf_counter()
    bad = []
    reps = all_reps()
    for rep in reps:
        h = verify_homomorphism(rep, 100, 1e-9, seed=0)
        d = derivative_residual(rep, rep.product())
        if not (h.ok and d <= 1e-6 and etale_check(rep)):
            bad.append(rep.label())
    dt = time.perf_counter() - t0
    ok = not bad and dt < 5.0
    record(3, ok, f"{len(reps)} formulas (8 families), homomorphism tol 1e-9, derivative tol 1e-6, "
                  f"failing {bad}, {dt:.2f} s (< 5 s)")
    assert ok


def test_04_geodesics_printed():
    failing = []
    checked = 0
    for fam, a in GEODESIC_FAMILIES:
        for va, vb in GEODESIC_VELOCITIES[fam]:
            v = verify_closed_form(fam, a, va, vb, 1e-6, "printed")
            checked += 1
            if not v.ok:
                failing.append(f"{_tag(fam, a)}@({va:g},{vb:g})")
    corrected = sum(1 for fam, a in GEODESIC_FAMILIES for va, vb in GEODESIC_VELOCITIES[fam]
                    if not verify_closed_form(fam, a, va, vb, 1e-6, "corrected").ok)
    ok = not failing
    fams = sorted({f.split("@")[0] for f in failing})
    record(4, ok, f"tol 1e-6 (fd residual and sup distance on the interior 90%), {checked} printed forms, "
                  f"{len(failing)} failing in {fams}; corrected forms failing: {corrected}")
    assert ok, failing


def test_05_development():
    worst, bad = 0.0, []
    for fam, a in GEODESIC_FAMILIES:
        for va, vb in GEODESIC_VELOCITIES[fam]:
            r = development_residual(fam, a, va, vb)
            worst = max(worst, r)
            if not r <= 1e-6:
                bad.append(f"{_tag(fam, a)}@({va:g},{vb:g})")
    ok = not bad
    record(5, ok, f"second difference tol 1e-6, max {worst:.2e}, failing {bad}")
    assert ok


def test_06_completeness():
    disagree, complete = [], []
    for fam, a, prod in atlas_members():
        p = completeness_probe(prod, horizon=50.0)
        if not p.agrees:
            disagree.append(_tag(fam, a))
        if p.trace_complete and not p.escapes:
            complete.append(_tag(fam, a))
    ok = not disagree and complete == ["F1(0)"]
    record(6, ok, f"horizon 50, 5x5 velocity grid, disagreements {disagree}, complete {complete}")
    assert ok


def test_07_structures():
    tol = 1e-9
    members = atlas_members() + [("F2", -0.5, family_product("F2", -0.5))]
    hess = {}
    for key, G in cx.HESSIAN_METRICS.items():
        hess[_tag(*key)] = sorted({_tag(f, a) for f, a, p in members if cx.hessian_check(p, G, tol)})
    hess_ok = all(v == [k] for k, v in hess.items())
    symp = sorted({_tag(f, a) for f, a, p in members if cx.symplectic_connection_check(p, cx.OMEGA, tol)})
    lc = cx.levi_civita(cx.LORENTZIAN_METRIC, aff_r())
    lc_r = float(np.max(np.abs(lc.gamma - F_I(-1.0, -1.0).gamma)))
    k = cx.kahler_check(aff_r(), cx.OMEGA, cx.KAHLER_J, tol)
    a2 = float(np.max(np.abs(cx.lsa_from_symplectic(cx.OMEGA, aff_r()).gamma - family_product("A2").gamma)))
    ok = hess_ok and symp == ["F1(-1)", "F2(-0.5)"] and lc_r <= 1e-12 and k.ok and a2 <= 1e-12
    record(7, ok, f"tol {tol:g}; hessian {hess}; symplectic {symp}; levi-civita residual {lc_r:.1e} (<= 1e-12); "
                  f"kahler {k.ok}; A2 residual {a2:.1e}")
    assert ok


def test_08_cotangent():
    reports = {_tag(*key): cx.cotangent_pseudo_kahler(family_product(*key), G, 1e-9)
               for key, G in cx.HESSIAN_METRICS.items()}
    bad = [k for k, r in reports.items() if not r.ok]
    worst = max(max(v for n, v in r.report.items() if n not in ("ok", "metric_det")) for r in reports.values())
    ok = not bad
    record(8, ok, f"tol 1e-9, 4 Hessian inputs, failing {bad}, max residual {worst:.1e}")
    assert ok


def test_09_projective():
    rep = sl2_block_rep("printed")
    r = projective_etale_check(rep, [0.0, 0.0, 1.0, 0.0], 1e-9)
    dims = {n: trace_zero_subalgebra(gl_gl_product(n)).dim for n in (1, 2, 3)}
    dims_ok = all(dims[n] == 2 * n * n - 1 for n in dims)
    printed = gl_gl_printed_report(2, seed=0)
    ok = r.ok and dims_ok
    record(9, ok, f"sl2 block rep with w = e3: etale {r.ok}, rank {r.rank}/4, bracket residual "
                  f"{rep.bracket_residual():g}, trace residual {rep.trace_residual():g}; trace-zero dims {dims} "
                  f"(want 2n^2-1); printed gl+gl product bilinear {printed['bilinear']}, "
                  f"associative {printed['associative']}")
    assert ok


def test_10_transform_groups():
    rng = np.random.default_rng(10)
    aff_bad, clos_bad, worst = [], [], 0.0
    for case in (1, 2, 3, 4, 6):
        alphas = (2.0, -0.5, 3.0) if case in (1, 2) else (None,)
        for a in alphas:
            for i in range(20):
                phi = random_transform(case, rng, a)
                for label, prod in paired_products(case, a):
                    v = verify_affinity(phi, prod, tol=1e-6, seed=i)
                    worst = max(worst, v.residuals["geodesic"])
                    if not v.ok:
                        aff_bad.append(f"case{case}:{label}")
                if not closure_check(phi, random_transform(case, rng, a), 1e-9, seed=i).ok:
                    clos_bad.append(f"case{case}")
    cocycles = {f"case{c}": symplectic_cocycle_search(case_algebra(c)).found for c in (1, 2, 3, 4)}
    cocycles["aff(R^2)"] = symplectic_cocycle_search(aff_rn_algebra(2)).found
    ok = not aff_bad and not clos_bad and all(cocycles.values())
    record(10, ok, f"20 draws per family, affinity tol 1e-6 (max {worst:.1e}), closure tol 1e-9, "
                   f"affinity failures {sorted(set(aff_bad))}, closure failures {sorted(set(clos_bad))}, "
                   f"cocycles {cocycles}")
    assert ok


def test_11_determinism():
    cmd = [sys.executable, "-m", "affinelie", "verify", "--seed", "11"]
    outs = [subprocess.run(cmd, capture_output=True, timeout=600).stdout for _ in range(2)]
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    record(11, ok, f"two runs of 'verify --seed 11', {len(outs[0])} bytes, identical {outs[0] == outs[1]}")
    assert ok


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for fn in tests:
        try:
            fn()
        except AssertionError:
            pass
    sys.exit(0 if all("PASS" in line for line in RESULTS.values()) else 1)
