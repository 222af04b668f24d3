"""Left-invariant connections: curvature, torsion, metrics, symplectic and complex structures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import BilinearProduct, LieAlgebra, Verdict, _maxabs, is_left_symmetric


def _sym_check(m, name, tol=1e-12):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square")
    return m


def torsion(prod: BilinearProduct, alg: LieAlgebra) -> np.ndarray:
    """T[i, j] = e_i.e_j - e_j.e_i - [e_i, e_j]."""
    if prod.dim != alg.dim:
        raise ValueError("dimension mismatch")
    g = prod.gamma
    return g - g.transpose(1, 0, 2) - alg.c


def curvature(prod: BilinearProduct, alg: LieAlgebra) -> np.ndarray:
    """R[i, j, k, l]: coefficient of e_l in R(e_i, e_j) e_k = L_i L_j e_k - L_j L_i e_k - L_[e_i,e_j] e_k."""
    if prod.dim != alg.dim:
        raise ValueError("dimension mismatch")
    g, c = prod.gamma, alg.c
    ll = np.einsum("jkm,iml->ijkl", g, g)
    return ll - ll.transpose(1, 0, 2, 3) - np.einsum("ijm,mkl->ijkl", c, g)


def levi_civita(metric, alg: LieAlgebra) -> BilinearProduct:
    """Koszul formula for left-invariant fields: 2<x.y, z> = <[x,y],z> - <[y,z],x> + <[z,x],y>."""
    G = _sym_check(metric, "metric")
    if G.shape[0] != alg.dim:
        raise ValueError("dimension mismatch")
    if abs(np.linalg.det(G)) <= 1e-12:
        raise ValueError("metric is singular")
    c = np.asarray(alg.c, dtype=float)
    b = np.einsum("ijm,mk->ijk", c, G)  # <[e_i, e_j], e_k>
    K = 0.5 * (b - b.transpose(2, 0, 1) + b.transpose(1, 2, 0))
    # K[i,j,k] = <e_i.e_j, e_k> = sum_m gamma[i,j,m] G[m,k]
    return BilinearProduct(np.einsum("ijk,km->ijm", K, np.linalg.inv(G)))


def metric_compatibility_residual(prod: BilinearProduct, metric) -> float:
    """max |<x.y, z> + <y, x.z>| on basis triples (parallel metric)."""
    G = np.asarray(metric, dtype=float)
    g = np.asarray(prod.gamma, dtype=float)
    a = np.einsum("ijm,mk->ijk", g, G)
    return _maxabs(a + a.transpose(0, 2, 1))


@dataclass(frozen=True)
class ProjectiveResult:
    ok: bool
    phi: np.ndarray
    residual: float

    def __bool__(self):
        return self.ok


def projectively_equivalent(p1: BilinearProduct, p2: BilinearProduct, tol: float = 1e-9) -> ProjectiveResult:
    """Least-squares phi with p2 - p1 = phi(X) Y + phi(Y) X on the invariant frame."""
    if p1.dim != p2.dim:
        raise ValueError("dimension mismatch")
    n = p1.dim
    D = np.asarray(p2.gamma, dtype=float) - np.asarray(p1.gamma, dtype=float)
    A = np.zeros((n, n, n, n))
    eye = np.eye(n)
    for m in range(n):
        # d/dphi_m of phi_i delta_jk + phi_j delta_ik
        A[:, :, :, m] = np.einsum("i,jk->ijk", eye[m], eye) + np.einsum("j,ik->ijk", eye[m], eye)
    A = A.reshape(n**3, n)
    phi, *_ = np.linalg.lstsq(A, D.ravel(), rcond=None)
    r = float(np.max(np.abs(A @ phi - D.ravel()))) if D.size else 0.0
    return ProjectiveResult(r <= tol, phi, r)


def hessian_residual(prod: BilinearProduct, metric) -> float:
    """max over triples of |<XY,Z> - <X,YZ> - <YX,Z> + <Y,XZ>|."""
    G = np.asarray(metric, dtype=float)
    g = np.asarray(prod.gamma, dtype=float)
    xy_z = np.einsum("ijm,mk->ijk", g, G)  # <e_i e_j, e_k>
    x_yz = np.einsum("im,jkm->ijk", G, g)  # <e_i, e_j e_k>
    d = xy_z - x_yz
    return _maxabs(d - d.transpose(1, 0, 2))


def hessian_check(prod: BilinearProduct, metric, tol: float = 1e-9) -> bool:
    G = _sym_check(metric, "metric")
    if np.max(np.abs(G - G.T)) > tol or abs(np.linalg.det(G)) <= tol:
        raise ValueError("metric must be symmetric and nondegenerate")
    return hessian_residual(prod, G) <= tol


def symplectic_connection_residual(prod: BilinearProduct, omega) -> float:
    W = np.asarray(omega, dtype=float)
    g = np.asarray(prod.gamma, dtype=float)
    a = np.einsum("ijm,mk->ijk", g, W)  # omega(e_i e_j, e_k)
    b = np.einsum("jm,ikm->ijk", W, g)  # omega(e_j, e_i e_k)
    return _maxabs(a + b)


def symplectic_connection_check(prod: BilinearProduct, omega, tol: float = 1e-9) -> bool:
    """omega(x.y, z) + omega(y, x.z) = 0 on basis triples."""
    W = _sym_check(omega, "omega")
    if abs(np.linalg.det(W)) <= tol:
        raise ValueError("omega is degenerate")
    return symplectic_connection_residual(prod, W) <= tol


def cocycle_residual(omega, alg: LieAlgebra) -> float:
    """max |omega([x,y],z) + omega([y,z],x) + omega([z,x],y)|."""
    W = np.asarray(omega, dtype=float)
    c = np.asarray(alg.c, dtype=float)
    t = np.einsum("ijm,mk->ijk", c, W)
    return _maxabs(t + t.transpose(1, 2, 0) + t.transpose(2, 0, 1))


def lsa_from_symplectic(omega, alg: LieAlgebra, tol: float = 1e-9) -> BilinearProduct:
    """Solve omega(a.b, c) = -omega(b, [a, c]) for the product."""
    W = _sym_check(omega, "omega")
    if W.shape[0] != alg.dim:
        raise ValueError("dimension mismatch")
    if np.max(np.abs(W + W.T)) > tol:
        raise ValueError("omega is not antisymmetric")
    if abs(np.linalg.det(W)) <= tol:
        raise ValueError("omega is degenerate")
    r = cocycle_residual(W, alg)
    if r > tol:
        raise ValueError(f"omega is not a 2-cocycle (residual {r:.3g})")
    c = np.asarray(alg.c, dtype=float)
    # rhs[a, b, k] = -omega(e_b, [e_a, e_k])
    rhs = -np.einsum("bm,akm->abk", W, c)
    # sum_m gamma[a,b,m] W[m,k] = rhs[a,b,k]
    return BilinearProduct(np.einsum("abk,km->abm", rhs, np.linalg.inv(W)))


def nijenhuis(j, alg: LieAlgebra) -> np.ndarray:
    """N[i, k] = ([je_i, je_k] - [e_i, e_k] - j[je_i, e_k] - j[e_i, je_k])."""
    J = np.asarray(j, dtype=float)
    c = np.asarray(alg.c, dtype=float)
    n = alg.dim
    br = lambda x, y: np.einsum("i,j,ijk->k", x, y, c)
    N = np.zeros((n, n, n))
    for i in range(n):
        for k in range(n):
            x, y = np.eye(n)[i], np.eye(n)[k]
            N[i, k] = br(J @ x, J @ y) - br(x, y) - J @ br(J @ x, y) - J @ br(x, J @ y)
    return N


def kahler_check(alg: LieAlgebra, omega, j, tol: float = 1e-9) -> Verdict:
    """j^2 = -I, Nijenhuis = 0, and g(a, b) = omega(a, j b) symmetric nondegenerate.

    The metric is returned as the verdict witness.
    """
    W = np.asarray(omega, dtype=float)
    J = np.asarray(j, dtype=float)
    n = alg.dim
    g = W @ J
    res = {
        "j_squared": float(np.max(np.abs(J @ J + np.eye(n)))),
        "nijenhuis": float(np.max(np.abs(nijenhuis(J, alg)))),
        "omega_cocycle": cocycle_residual(W, alg),
        "omega_antisymmetry": float(np.max(np.abs(W + W.T))),
        "metric_symmetry": float(np.max(np.abs(g - g.T))),
        "metric_det": float(abs(np.linalg.det(g))),
    }
    ok = (res["j_squared"] <= tol and res["nijenhuis"] <= tol and res["omega_cocycle"] <= tol
          and res["omega_antisymmetry"] <= tol and res["metric_symmetry"] <= tol and res["metric_det"] > tol)
    return Verdict(ok, res, g)


@dataclass(frozen=True)
class CotangentResult:
    algebra: LieAlgebra
    product: BilinearProduct
    omega: np.ndarray
    j: np.ndarray
    metric: np.ndarray
    report: dict

    @property
    def ok(self) -> bool:
        return bool(self.report["ok"])


def cotangent_product(prod: BilinearProduct, alg: LieAlgebra | None = None) -> BilinearProduct:
    """Extension of g by the bimodule g*: (alpha, a).(beta, b) = (-beta o ad_a + alpha o R_b, a.b).

    Basis order: g* first (dual basis), then g.
    """
    alg = alg or prod.commutator_algebra()
    n = prod.dim
    g = np.asarray(prod.gamma, dtype=float)
    c = np.asarray(alg.c, dtype=float)
    big = np.zeros((2 * n, 2 * n, 2 * n))
    for p in range(n):
        for q in range(n):
            big[n + p, n + q, n:] = g[p, q]
            # e_p* . e_q = e_p* o R_{e_q}: k -> gamma[k, q, p]
            big[p, n + q, :n] = g[:, q, p]
            # e_q . e_p* = -e_p* o ad_{e_q}: k -> -c[q, k, p]
            big[n + q, p, :n] = -c[q, :, p]
    return BilinearProduct(big)


def cotangent_pseudo_kahler(prod: BilinearProduct, metric, tol: float = 1e-9) -> CotangentResult:
    """Cotangent extension of a Hessian pair with its symplectic form, complex structure and metric."""
    G = _sym_check(metric, "metric")
    if not hessian_check(prod, G, tol):
        raise ValueError("(product, metric) is not a Hessian pair")
    n = prod.dim
    big = cotangent_product(prod)
    alg = big.commutator_algebra()
    I, Z = np.eye(n), np.zeros((n, n))
    W = np.block([[Z, I], [-I, Z]])
    # j(0, x) = (-G x, 0), j(G x, 0) = (0, x)
    J = np.block([[Z, -G], [np.linalg.inv(G), Z]])
    g2 = W @ J
    lsa = is_left_symmetric(big, alg, tol)
    restricted = float(np.max(np.abs(big.gamma[n:, n:, n:] - np.asarray(prod.gamma, dtype=float))))
    report = {
        "associator_symmetry": lsa.residuals["associator_symmetry"],
        "torsion": lsa.residuals["torsion"],
        "jacobi": float(alg.jacobi_residual()),
        "omega_cocycle": cocycle_residual(W, alg),
        "j_squared": float(np.max(np.abs(J @ J + np.eye(2 * n)))),
        "nijenhuis": float(np.max(np.abs(nijenhuis(J, alg)))),
        "metric_symmetry": float(np.max(np.abs(g2 - g2.T))),
        "metric_det": float(abs(np.linalg.det(g2))),
        "restriction_to_g": restricted,
    }
    report["ok"] = bool(
        lsa.ok and report["omega_cocycle"] <= tol and report["j_squared"] <= tol
        and report["nijenhuis"] <= tol and report["metric_symmetry"] <= tol
        and report["metric_det"] > tol and restricted <= tol and report["jacobi"] <= tol)
    return CotangentResult(alg, big, W, J, g2, report)


# --- reference structures on aff(R) ------------------------------------------------

OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])  # omega(e1, e2) = 1
KAHLER_J = np.array([[0.0, 1.0], [-1.0, 0.0]])  # j e1 = -e2, j e2 = e1
LORENTZIAN_METRIC = np.array([[1.0, -1.0], [-1.0, 0.0]])
HESSIAN_METRICS = {
    ("F1", -1.0): np.array([[0.0, 1.0], [1.0, 0.0]]),
    ("F2", -2.0): np.array([[1.0, -0.25], [-0.25, 0.125]]),
    ("R1", None): np.diag([2.0, 1.0]),
    ("R2", None): np.diag([2.0, -1.0]),
}
