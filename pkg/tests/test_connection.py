import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from affinelie import connection as cx
from affinelie.algebra import BilinearProduct, LieAlgebra, aff_r, is_left_symmetric
from affinelie.atlas import atlas_members, family_product
from affinelie.transforms import cocycle_space

ALG = aff_r()
MEMBERS = atlas_members() + [("F2", -0.5, family_product("F2", -0.5))]


def koszul(metric, c):
    """Levi-Civita product of a left-invariant metric, one entry at a time."""
    n = len(metric)
    G = np.asarray(metric, dtype=float)
    Ginv = np.linalg.inv(G)
    g = np.zeros((n, n, n))
    for i, j in itertools.product(range(n), repeat=2):
        low = np.zeros(n)  # <e_i e_j, e_k>
        for k in range(n):
            br = lambda a, b: c[a, b]
            low[k] = 0.5 * (br(i, j) @ G[:, k] - br(j, k) @ G[:, i] + br(k, i) @ G[:, j])
        g[i, j] = Ginv @ low
    return g


def test_levi_civita_lorentzian_is_f1_minus_one():
    lc = cx.levi_civita(cx.LORENTZIAN_METRIC, ALG)
    assert np.allclose(lc.gamma, koszul(cx.LORENTZIAN_METRIC, np.asarray(ALG.c)), atol=1e-14)
    assert np.allclose(lc.gamma, family_product("F1", -1.0).gamma, atol=1e-14)
    assert cx.metric_compatibility_residual(lc, cx.LORENTZIAN_METRIC) < 1e-14
    assert np.max(np.abs(cx.torsion(lc, ALG))) < 1e-14 and np.max(np.abs(cx.curvature(lc, ALG))) < 1e-14


@given(st.floats(0.2, 3), st.floats(-1, 1), st.floats(0.2, 3))
def test_levi_civita_torsion_free_and_compatible(a, b, d):
    G = np.array([[a, b], [b, d]])
    if abs(np.linalg.det(G)) < 1e-3:
        return
    lc = cx.levi_civita(G, ALG)
    assert np.allclose(lc.gamma, koszul(G, np.asarray(ALG.c)), atol=1e-9)
    assert cx.metric_compatibility_residual(lc, G) < 1e-9


@pytest.mark.parametrize("key", list(cx.HESSIAN_METRICS))
def test_hessian_metrics_select_exactly_their_class(key):
    G = cx.HESSIAN_METRICS[key]
    passing = [(f, a) for f, a, p in MEMBERS if cx.hessian_check(p, G)]
    assert passing == [key]


def test_hessian_rejects_bad_metric():
    with pytest.raises(ValueError):
        cx.hessian_check(family_product("R1"), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        cx.hessian_check(family_product("R1"), [[1, 2], [0, 1]])


def test_symplectic_connections():
    passing = sorted({(f, a) for f, a, p in MEMBERS if cx.symplectic_connection_check(p, cx.OMEGA)})
    assert passing == [("F1", -1.0), ("F2", -0.5)]


def test_lsa_from_symplectic_is_a2():
    p = cx.lsa_from_symplectic(cx.OMEGA, ALG)
    assert p == family_product("A2")
    # the defining identity, checked directly
    for a, b, c in itertools.product(range(2), repeat=3):
        lhs = p.gamma[a, b] @ cx.OMEGA[:, c]
        assert abs(lhs + np.eye(2)[b] @ cx.OMEGA @ ALG.c[a, c]) < 1e-14


def test_lsa_from_symplectic_errors():
    with pytest.raises(ValueError):
        cx.lsa_from_symplectic(np.zeros((2, 2)), ALG)
    with pytest.raises(ValueError):
        cx.lsa_from_symplectic(np.eye(2), ALG)


def aff_sum():
    return LieAlgebra.from_brackets(4, {(0, 1): [0, 1, 0, 0], (2, 3): [0, 0, 0, 1]})


@given(st.integers(0, 2**16))
def test_random_cocycle_gives_lsa(seed):
    alg = aff_sum()
    space = cocycle_space(alg)
    rng = np.random.default_rng(seed)
    W = np.einsum("r,rij->ij", rng.uniform(-2, 2, len(space)), space)
    if abs(np.linalg.det(W)) < 1e-3:
        return
    assert cx.cocycle_residual(W, alg) < 1e-12
    assert is_left_symmetric(cx.lsa_from_symplectic(W, alg), alg, 1e-9).ok


def test_kahler_structure():
    v = cx.kahler_check(ALG, cx.OMEGA, cx.KAHLER_J)
    assert v.ok and np.allclose(v.witness, -np.eye(2))
    assert not cx.kahler_check(ALG, cx.OMEGA, np.eye(2)).ok


def test_projective_equivalence_recovers_phi():
    p = family_product("R1")
    phi = np.array([0.3, -1.2])
    d = np.einsum("i,jk->ijk", phi, np.eye(2)) + np.einsum("j,ik->ijk", phi, np.eye(2))
    q = BilinearProduct(np.asarray(p.gamma) + d)
    r, s = cx.projectively_equivalent(p, q), cx.projectively_equivalent(q, p)
    assert r.ok and s.ok and np.allclose(r.phi, phi) and np.allclose(s.phi, -phi)


def test_projective_equivalence_symmetric_on_atlas():
    for (_, _, p), (_, _, q) in itertools.combinations(atlas_members(), 2):
        assert cx.projectively_equivalent(p, q).ok == cx.projectively_equivalent(q, p).ok


@pytest.mark.parametrize("key", list(cx.HESSIAN_METRICS))
def test_cotangent_pseudo_kahler(key):
    res = cx.cotangent_pseudo_kahler(family_product(*key), cx.HESSIAN_METRICS[key])
    assert res.ok, res.report
    assert res.product.dim == 4 and res.report["restriction_to_g"] == 0.0


def test_cotangent_requires_hessian_pair():
    with pytest.raises(ValueError):
        cx.cotangent_pseudo_kahler(family_product("A1"), cx.HESSIAN_METRICS[("R1", None)])
