import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from affinelie.algebra import aff_r, is_left_symmetric
from affinelie.atlas import (F1, F2, F_I, F_II, OffVariety, atlas_members, canonical_point,
                             canonical_representative, classify, component_I, component_II, component_III,
                             family_product, invariants, lsa_isomorphic, point_to_product, product_to_point,
                             sample_component, sample_off_variety, variety_residual)

coords = st.floats(-3, 3, allow_nan=False).map(lambda v: round(v, 6))


def test_variety_equals_lsa_conditions_groebner():
    """Associator symmetry of a generic torsion-compatible product generates the same ideal."""
    a, b, c, d, e, l = syms = sp.symbols("alpha beta gamma delta eps lam")
    G = {(0, 0): (a, b), (0, 1): (c, d + 1), (1, 0): (c, d), (1, 1): (e, l)}

    def mul(x, y):
        out = [0, 0]
        for i, j, k in itertools.product(range(2), repeat=3):
            out[k] += x[i] * y[j] * G[(i, j)][k]
        return [sp.expand(v) for v in out]

    E = [[1, 0], [0, 1]]
    eqs = set()
    for i, j, k in itertools.product(range(2), repeat=3):
        x, y, z = E[i], E[j], E[k]
        A = [p - q for p, q in zip(mul(mul(x, y), z), mul(x, mul(y, z)))]
        B = [p - q for p, q in zip(mul(mul(y, x), z), mul(y, mul(x, z)))]
        eqs |= {sp.expand(u - v) for u, v in zip(A, B)} - {0}
    V = [b * e - c * d + c, a * d - b * c + b * l - d * d, a * e - c * c + c * l - d * e - 2 * e, b * e - c * d - l]
    assert sp.groebner(list(eqs), *syms, order="grevlex") == sp.groebner(V, *syms, order="grevlex")
    # and the numeric residual is the same polynomial list
    pt = (0.3, -1.1, 0.7, 2.0, -0.4, 1.3)
    assert np.allclose(variety_residual(pt), [float(v.subs(dict(zip(syms, pt)))) for v in V])


def test_residual_of_all_ones():
    assert variety_residual([1] * 6).tolist() == [1.0, 0.0, -2.0, -1.0]
    tag = classify([1] * 6)
    assert isinstance(tag, OffVariety) and not tag and tag.residual == (1.0, 0.0, -2.0, -1.0)


@pytest.mark.parametrize("pt,label,comp,special", [
    ((1, 0, 0, 0, 0, 0), "A1", "I", ("bi-invariant",)),
    ((0, 0, 0, 0, 0, 0), "F1(0)", "I", ("complete",)),
    ((-1, -1, 0, 0, 0, 0), "F1(-1)", "I", ("Hessian", "Lorentzian", "symplectic-connection")),
    ((-1, 0, 0, -1, 0, 0), "A2", "II", ("bi-invariant", "coadjoint-symplectic")),
    ((-0.5, 0.5, 0, -0.5, 0, 0), "F2(-1/2)", "II", ("symplectic-connection",)),
    ((-2, 2, 0, -2, 0, 0), "F2(-2)", "II", ("Hessian",)),
    ((2, 0, 0, 0, 1, 0), "R1", "III", ("Hessian",)),
    ((2, 0, 0, 0, -1, 0), "R2", "III", ("Hessian",)),
    ((1, 5, 0, 0, 0, 0), "F1(1)", "I", ()),
])
def test_classify_examples(pt, label, comp, special):
    tag = classify(pt)
    assert tag.label() == label and tag.component == comp and tag.special == special


def test_intersection_line_goes_to_component_one():
    assert classify((0, 2.5, 0, 0, 0, 0)).component == "I"


@given(coords, coords)
def test_components_I_II_on_variety(a, b):
    for p in (component_I(a, b), component_II(a, b)):
        assert np.max(np.abs(variety_residual(p))) == 0.0
        assert is_left_symmetric(point_to_product(p), aff_r()).ok


@given(coords, st.floats(0.5, 3).map(lambda v: round(v, 6)), st.booleans())
def test_component_III_on_variety(g, e, neg):
    e = -e if neg else e
    p = component_III(g, e)
    assert np.max(np.abs(variety_residual(p))) < 1e-11
    tag = classify(p)
    assert tag.component == "III" and tag.family == ("R2" if neg else "R1")


@given(st.lists(coords, min_size=6, max_size=6))
def test_classify_agrees_with_lsa_check(vals):
    on = np.max(np.abs(variety_residual(vals))) <= 1e-9
    assert bool(classify(vals)) == on
    assert is_left_symmetric(point_to_product(vals), aff_r(), tol=1e-9).ok == on


def test_samplers(rng):
    for comp in ("I", "II", "III"):
        assert all(np.max(np.abs(variety_residual(p))) < 1e-11 for p in sample_component(comp, rng, 50))
    assert not any(classify(p) for p in sample_off_variety(rng, 50))


@given(st.lists(coords, min_size=6, max_size=6))
def test_point_product_roundtrip(vals):
    p, torsion = product_to_point(point_to_product(vals))
    # delta passes through delta + 1, so allow one rounding step
    assert np.allclose(p.as_tuple(), vals, rtol=0, atol=1e-15) and torsion <= 1e-15


def test_canonical_points_match_products():
    for fam, a, prod in atlas_members():
        assert point_to_product(canonical_point(fam, a)) == prod
        assert canonical_representative(canonical_point(fam, a)) == prod


def test_family_product_errors():
    with pytest.raises(ValueError):
        family_product("F2", 0.0)
    with pytest.raises(ValueError):
        family_product("F1")
    with pytest.raises(ValueError):
        family_product("Q")
    with pytest.raises(ValueError):
        component_III(1.0, 0.0)


@pytest.mark.parametrize("p,q", [
    (F_I(2.0, 0.7), F1(2.0)),
    (F_II(3.0, 1.5), F2(3.0)),
    (point_to_product(component_III(1.2, 0.8)), family_product("R1")),
])
def test_isomorphic_to_canonical(p, q):
    r = lsa_isomorphic(p, q)
    assert r.ok and abs(np.linalg.det(r.P)) > 1e-8


def test_distinct_classes_separated_by_invariants():
    seen = {}
    for fam, a, prod in atlas_members():
        key = (fam, a)
        seen[key] = invariants(prod)
    assert seen[("F1", 0.0)]["complete"] and not seen[("F1", 1.0)]["complete"]
    assert seen[("A1", None)] != seen[("F1", 0.0)]
    assert not lsa_isomorphic(family_product("R1"), family_product("R2"), grid=(-1.0, 1.0)).ok
