import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from affinelie.algebra import BilinearProduct, aff_rn_product, gl_gl_product
from affinelie.atlas import family_product
from affinelie.projective import (SL2_BASIS, LinearRep, matrix_algebra, projective_etale_check, sl2_algebra,
                                  sl2_block_rep, sl2_left_regular_rep, sl2_report, spanning_matrix,
                                  trace_zero_subalgebra)

E3 = [0.0, 0.0, 1.0, 0.0]
IDENT = [1.0, 0.0, 0.0, 1.0]


def test_sl2_basis_brackets():
    alg = sl2_algebra()
    assert alg.jacobi_residual() == 0
    H, Ep, Em = SL2_BASIS
    assert np.array_equal(H @ Ep - Ep @ H, 2 * Ep) and np.array_equal(Ep @ Em - Em @ Ep, H)


def test_printed_block_rep_with_e3():
    rep = sl2_block_rep("printed")
    r = projective_etale_check(rep, E3)
    assert not r.ok and r.rank == 1
    assert rep.bracket_residual() == 2.0 and rep.trace_residual() == 1.0
    # theta(e_i) e3 vanishes for every i, so only w itself survives
    assert np.array_equal(spanning_matrix(rep, E3)[:, :3], np.zeros((4, 3)))


def test_offset_block_rep_is_a_rep_but_not_etale():
    rep = sl2_block_rep("offset")
    assert rep.bracket_residual() == 0.0 and rep.trace_residual() == 0.0
    assert projective_etale_check(rep, E3).rank == 1
    # no vector works: the image of every w sits in a 2+1 dimensional span
    rng = np.random.default_rng(0)
    assert not any(projective_etale_check(rep, w).ok for w in rng.standard_normal((20, 4)))


def test_left_regular_rep_is_etale_at_identity():
    rep = sl2_left_regular_rep()
    assert rep.bracket_residual() == 0.0 and rep.trace_residual() == 0.0
    r = projective_etale_check(rep, IDENT)
    assert r.ok and r.rank == 4
    # theta(u) I = u, so the spanning set is the basis of sl(2) plus I
    cols = spanning_matrix(rep, IDENT)
    assert np.array_equal(cols[:, :3], SL2_BASIS.reshape(3, 4).T)


@given(st.floats(0.1, 10), st.booleans())
def test_verdict_invariant_under_scaling_w(s, neg):
    s = -s if neg else s
    for rep, w in ((sl2_left_regular_rep(), IDENT), (sl2_block_rep("printed"), E3)):
        base = projective_etale_check(rep, w)
        scaled = projective_etale_check(rep, s * np.asarray(w))
        assert scaled.ok == base.ok and scaled.rank == base.rank


def test_shape_errors():
    with pytest.raises(ValueError):
        projective_etale_check(sl2_left_regular_rep(), [1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        projective_etale_check(LinearRep(np.zeros((2, 4, 4))), IDENT)
    with pytest.raises(ValueError):
        LinearRep(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        sl2_block_rep("bogus")
    with pytest.raises(ValueError):
        LinearRep(np.zeros((2, 3, 3))).bracket_residual()


def test_report_keys():
    rep = sl2_report()
    assert [rep[k]["etale"] for k in ("printed", "offset", "left_regular")] == [False, False, True]


def test_json_roundtrip():
    rep = sl2_left_regular_rep()
    back = LinearRep.from_json(json.dumps(rep.to_json()))
    assert np.array_equal(back.matrices, rep.matrices) and back.label == rep.label
    assert back.source == rep.source and back.bracket_residual() == 0.0
    with pytest.raises(ValueError):
        LinearRep.from_json({"label": "x"})


def brute_trace_zero_dim(prod):
    n = prod.dim
    tau = [sum(prod.gamma[i, j, j] for j in range(n)) for i in range(n)]
    return n - (1 if any(abs(t) > 1e-12 for t in tau) else 0)


@pytest.mark.parametrize("prod,dim", [(gl_gl_product(1), 1), (gl_gl_product(2), 7), (gl_gl_product(3), 17),
                                      (matrix_algebra(2), 3), (matrix_algebra(3), 8),
                                      (BilinearProduct(np.ones((1, 1, 1))), 0)])
def test_trace_zero_dimensions(prod, dim):
    t = trace_zero_subalgebra(prod)
    assert t.dim == dim == brute_trace_zero_dim(prod)
    assert t.closed


def test_matrix_algebra_is_matrix_multiplication():
    p = matrix_algebra(2)
    rng = np.random.default_rng(2)
    A, B = rng.standard_normal((2, 2, 2))
    assert np.allclose(p.mul(A.ravel(), B.ravel()), (A @ B).ravel())


def test_trace_zero_needs_associative():
    with pytest.raises(ValueError):
        trace_zero_subalgebra(family_product("R1"))
    assert trace_zero_subalgebra(aff_rn_product(1)).closed
