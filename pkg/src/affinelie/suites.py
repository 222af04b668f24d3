"""Invariant suites run by ``affinelie verify``.

Each suite returns ``{"ok": bool, "checks": {...}}`` with the residuals that decided it.
Items recorded under ``findings`` document formulas that are kept as printed and known
to fail; they are reported but do not change the exit status.
"""

from __future__ import annotations

import numpy as np

from . import connection as cx
from .algebra import (BilinearProduct, aff_r, aff_rn_algebra, aff_rn_product, gl_gl_printed_report, gl_gl_product,
                      is_associative, is_left_symmetric)
from .atlas import atlas_members, classify, family_product, sample_component, sample_off_variety, variety_residual
from .geodesics import (GEODESIC_FAMILIES, GEODESIC_VELOCITIES, completeness_probe, development_residual,
                        verify_closed_form)
from .projective import projective_etale_check, sl2_block_rep, sl2_left_regular_rep, trace_zero_subalgebra
from .reps import AffineRep, all_reps, derivative_residual, etale_check, verify_homomorphism
from .transforms import CASES, case_summary, case_algebra, symplectic_cocycle_search, verify_case_lsa

DEFAULT_TOLS = {
    "lsa": 1e-12,
    "variety": 1e-12,
    "classify": 1e-9,
    "homomorphism": 1e-9,
    "derivative": 1e-6,
    "geodesic": 1e-6,
    "development": 1e-6,
    "structure": 1e-9,
    "affinity": 1e-6,
    "closure": 1e-9,
    "projective": 1e-9,
}


def _tag(fam, alpha):
    return fam if alpha is None else f"{fam}({alpha:g})"


def suite_algebra(seed, tols, mutate=False):
    alg = aff_r()
    checks = {}
    for fam, a, prod in atlas_members():
        if mutate and fam == "F1" and a == 2.0:
            g = np.array(prod.gamma)
            g[1, 1, 0] += 1e-3  # leaves the variety
            prod = BilinearProduct(g)
        v = is_left_symmetric(prod, alg, tols["lsa"])
        checks[_tag(fam, a)] = {"ok": v.ok, **v.residuals}
    for n in (1, 2, 3):
        v = is_associative(aff_rn_product(n), tols["lsa"])
        checks[f"aff_rn({n})_associative"] = {"ok": v.ok, **v.residuals}
        w = is_left_symmetric(aff_rn_product(n), aff_rn_algebra(n), tols["lsa"])
        checks[f"aff_rn({n})_lsa"] = {"ok": w.ok, **w.residuals}
    for n in (1, 2):
        v = is_associative(gl_gl_product(n), tols["lsa"])
        checks[f"gl_gl({n})_associative"] = {"ok": v.ok, **v.residuals}
    return _collect(checks)


def suite_variety(seed, tols, n=200):
    rng = np.random.default_rng(seed)
    checks = {}
    for comp in ("I", "II", "III"):
        pts = sample_component(comp, rng, n)
        res = max(float(np.max(np.abs(variety_residual(p)))) for p in pts)
        tags = [classify(p, tols["classify"]) for p in pts]
        # the I/II intersection alpha = delta = 0 belongs to Component I
        right = sum(1 for p, t in zip(pts, tags) if t and (t.component == comp or (comp == "II" and p.alpha == 0)))
        checks[comp] = {"ok": res <= tols["variety"] and right == n, "max_residual": res, "correct": right,
                        "samples": n}
    off = sample_off_variety(rng, n)
    rejected = sum(1 for p in off if not classify(p, tols["classify"]))
    checks["off_variety"] = {"ok": rejected == n, "rejected": rejected, "samples": n}
    return _collect(checks)


def suite_reps(seed, tols, mutate=False):
    checks = {}
    for rep in all_reps():
        if mutate and rep.label() == "a1":
            base = rep.fn
            rep = AffineRep("a1", None, lambda x, y: base(x, y) + np.diag([0.0, 1e-3 * y, 0.0]))
        h = verify_homomorphism(rep, 100, tols["homomorphism"], seed)
        d = derivative_residual(rep, rep.product())
        e = etale_check(rep)
        checks[rep.label()] = {"ok": h.ok and d <= tols["derivative"] and e, **h.residuals, "derivative": d,
                               "etale": e}
    return _collect(checks)


def suite_geodesics(seed, tols, variants=("corrected", "developed")):
    checks = {}
    for variant in variants:
        for fam, a in GEODESIC_FAMILIES:
            worst, ok, forms = 0.0, True, set()
            for va, vb in GEODESIC_VELOCITIES[fam]:
                v = verify_closed_form(fam, a, va, vb, tols["geodesic"], variant)
                ok &= v.ok
                forms.add(v.formulation)
                if v.formulation:
                    r = v.residuals[v.formulation]
                    worst = max(worst, r["fd_residual"], r["numeric_distance"])
                else:
                    worst = float("inf")
            checks[f"{variant}:{_tag(fam, a)}"] = {"ok": bool(ok), "formulation": sorted(f or "none" for f in forms),
                                                  "max_residual": worst}
    return _collect(checks)


def suite_development(seed, tols):
    checks = {}
    for fam, a in GEODESIC_FAMILIES:
        r = max(development_residual(fam, a, va, vb) for va, vb in GEODESIC_VELOCITIES[fam][:3])
        checks[_tag(fam, a)] = {"ok": r <= tols["development"], "second_difference": r}
    return _collect(checks)


def suite_completeness(seed, tols):
    checks = {}
    for fam, a, prod in atlas_members():
        p = completeness_probe(prod)
        checks[_tag(fam, a)] = {"ok": p.agrees, "trace_complete": p.trace_complete, "escapes": len(p.escapes)}
    complete = sorted(k for k, v in checks.items() if v["trace_complete"])
    checks["only_F1(0)"] = {"ok": complete == ["F1(0)"], "complete": complete}
    return _collect(checks)


def suite_structures(seed, tols):
    tol = tols["structure"]
    alg = aff_r()
    checks = {}
    members = atlas_members()
    for (fam, a), G in cx.HESSIAN_METRICS.items():
        passing = sorted(_tag(f, b) for f, b, p in members if cx.hessian_check(p, G, tol))
        checks[f"hessian:{_tag(fam, a)}"] = {"ok": passing == [_tag(fam, a)], "passing": passing}
    symp = sorted(_tag(f, b) for f, b, p in members + [("F2", -0.5, family_product("F2", -0.5))]
                  if cx.symplectic_connection_check(p, cx.OMEGA, tol))
    symp = sorted(set(symp))
    checks["symplectic_connection"] = {"ok": symp == ["F1(-1)", "F2(-0.5)"], "passing": symp}
    lc = cx.levi_civita(cx.LORENTZIAN_METRIC, alg)
    r = float(np.max(np.abs(lc.gamma - family_product("F1", -1.0).gamma)))
    checks["levi_civita"] = {"ok": r <= 1e-12, "residual": r}
    k = cx.kahler_check(alg, cx.OMEGA, cx.KAHLER_J, tol)
    checks["kahler"] = {"ok": k.ok, **k.residuals, "metric": np.asarray(k.witness).tolist()}
    p = cx.lsa_from_symplectic(cx.OMEGA, alg, tol)
    r = float(np.max(np.abs(p.gamma - family_product("A2").gamma)))
    checks["lsa_from_symplectic"] = {"ok": r <= tol, "residual_vs_A2": r}
    return _collect(checks)


def suite_cotangent(seed, tols):
    checks = {}
    for (fam, a), G in cx.HESSIAN_METRICS.items():
        res = cx.cotangent_pseudo_kahler(family_product(fam, a), G, tols["structure"])
        checks[_tag(fam, a)] = dict(res.report)
    return _collect(checks)


def suite_projective(seed, tols):
    checks = {}
    r = projective_etale_check(sl2_left_regular_rep(), [1.0, 0.0, 0.0, 1.0], tols["projective"])
    checks["sl2_left_regular"] = {"ok": r.ok, "rank": r.rank, "singular_values": list(r.singular_values),
                                  "bracket_residual": sl2_left_regular_rep().bracket_residual()}
    for n in (1, 2, 3):
        t = trace_zero_subalgebra(gl_gl_product(n))
        checks[f"trace_zero_gl_gl({n})"] = {"ok": t.dim == 2 * n * n - 1 and t.closed, "dim": t.dim,
                                           "closure_residual": t.closure_residual}
    return _collect(checks)


def suite_transforms(seed, tols):
    checks = {}
    for case in CASES:
        alphas = (2.0, -0.5) if case in (1, 2) else (None,)
        for a in alphas:
            s = case_summary(case, a, seed, draws=20, tol=tols["affinity"])
            key = f"case{case}" + ("" if a is None else f"({a:g})")
            if case == 4:
                # the printed table is reported under findings; the family itself generates the derived one
                s["ok"] = bool(s["affinity"]["ok"] and s["closure"]["ok"] and s["cocycle_derived"]["found"])
                s["lsa"] = verify_case_lsa(4, "derived")
            checks[key] = s
    return _collect(checks)


SUITES = {
    "algebra": suite_algebra,
    "variety": suite_variety,
    "reps": suite_reps,
    "geodesics": suite_geodesics,
    "development": suite_development,
    "completeness": suite_completeness,
    "structures": suite_structures,
    "cotangent": suite_cotangent,
    "projective": suite_projective,
    "transforms": suite_transforms,
}
MUTABLE = ("algebra", "reps")


def findings(seed, tols) -> dict:
    """Printed formulas known to fail, with their residuals."""
    out = {}
    bad = {}
    for a in (-3.0, -2.0, -0.5, 0.5, 1.0, 2.0, 3.0):
        v = verify_closed_form("f2", a, 1.0, 1.0, tols["geodesic"], "printed")
        bad[f"f2({a:g})"] = v.ok
    out["printed_f2_geodesic"] = {"passes": bad}
    r = projective_etale_check(sl2_block_rep("printed"), [0.0, 0.0, 1.0, 0.0])
    out["sl2_block_printed_w_e3"] = {"etale": r.ok, "rank": r.rank,
                                     "bracket_residual": sl2_block_rep("printed").bracket_residual()}
    alg = case_algebra(4, "printed")
    coc = symplectic_cocycle_search(alg, seed)
    out["case4_printed_table"] = {"jacobi": float(alg.jacobi_residual()), "cocycle_found": coc.found,
                                  "cocycle_space_dim": coc.space_dim}
    rep = gl_gl_printed_report(2, seed=seed)
    out["gl_gl_printed"] = {k: rep[k] for k in ("bilinear", "associative")}
    return out


def run(seed: int = 0, tols: dict | None = None, only=None, mutate: bool = False) -> dict:
    tols = {**DEFAULT_TOLS, **(tols or {})}
    names = list(SUITES) if not only else list(only)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suites: {', '.join(unknown)}")
    results = {}
    for name in names:
        fn = SUITES[name]
        results[name] = fn(seed, tols, mutate=mutate) if name in MUTABLE else fn(seed, tols)
    report = {
        "seed": seed,
        "tolerances": tols,
        "suites": results,
        "ok": all(r["ok"] for r in results.values()),
    }
    if not only:
        report["findings"] = findings(seed, tols)
    return report


def _collect(checks: dict) -> dict:
    return {"ok": all(bool(c["ok"]) for c in checks.values()), "checks": checks}
