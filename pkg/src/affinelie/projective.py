"""Projective étale criteria, the sl(2) examples, and trace-zero subalgebras."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .algebra import BilinearProduct, LieAlgebra, is_associative, left_mult

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class LinearRep:
    """theta(e_i) for each basis vector of an n-dim algebra, as m x m matrices."""

    matrices: np.ndarray
    source: LieAlgebra | None = None
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrices, dtype=float)
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise ValueError(f"matrices must have shape (n, m, m), got {m.shape}")
        if self.source is not None and self.source.dim != m.shape[0]:
            raise ValueError("source algebra dimension does not match the number of matrices")
        m.setflags(write=False)
        object.__setattr__(self, "matrices", m)

    @property
    def n(self) -> int:
        return self.matrices.shape[0]

    @property
    def m(self) -> int:
        return self.matrices.shape[1]

    def __call__(self, x) -> np.ndarray:
        return np.einsum("i,ijk->jk", np.asarray(x, dtype=float), self.matrices)

    def trace_residual(self) -> float:
        return float(np.max(np.abs(np.trace(self.matrices, axis1=1, axis2=2))))

    def bracket_residual(self) -> float:
        """max |theta([e_i, e_j]) - [theta(e_i), theta(e_j)]|; needs the source algebra."""
        if self.source is None:
            raise ValueError("bracket residual needs the source Lie algebra")
        c = np.asarray(self.source.c, dtype=float)
        T = self.matrices
        lhs = np.einsum("ijk,kab->ijab", c, T)
        rhs = np.einsum("iab,jbc->ijac", T, T) - np.einsum("jab,ibc->ijac", T, T)
        return float(np.max(np.abs(lhs - rhs)))

    def to_json(self) -> dict:
        doc = {"matrices": self.matrices.tolist()}
        if self.label:
            doc["label"] = self.label
        if self.source is not None:
            c = np.asarray(self.source.c, dtype=float)
            doc["brackets"] = [[i, j, k, float(v)] for (i, j, k), v in np.ndenumerate(c) if v != 0 and i < j]
        return doc

    @classmethod
    def from_json(cls, doc) -> "LinearRep":
        if isinstance(doc, str):
            doc = json.loads(doc)
        if "matrices" not in doc:
            raise ValueError("representation document needs 'matrices'")
        mats = np.asarray(doc["matrices"], dtype=float)
        src = None
        if "brackets" in doc:
            n = mats.shape[0]
            c = np.zeros((n, n, n))
            for i, j, k, v in doc["brackets"]:
                c[i, j, k] += v
                c[j, i, k] -= v
            src = LieAlgebra(c)
        return cls(mats, src, doc.get("label", ""))


@dataclass(frozen=True)
class EtaleResult:
    ok: bool
    singular_values: tuple
    rank: int
    trace_residual: float

    def __bool__(self):
        return self.ok


def spanning_matrix(theta: LinearRep, w) -> np.ndarray:
    """Columns theta(e_1) w, ..., theta(e_n) w, w."""
    w = np.asarray(w, dtype=float)
    return np.column_stack([T @ w for T in theta.matrices] + [w])


def projective_etale_check(theta: LinearRep, w, tol: float = 1e-9) -> EtaleResult:
    """theta(g) w + R w = R^{n+1}, decided by singular values.

    Tracelessness is a precondition of the criterion; it is reported, not enforced,
    so that representations that miss it can still be measured.
    """
    if theta.m != theta.n + 1:
        raise ValueError(f"need m = n + 1, got n = {theta.n}, m = {theta.m}")
    w = np.asarray(w, dtype=float)
    if w.shape != (theta.m,):
        raise ValueError(f"w must have length {theta.m}")
    s = np.linalg.svd(spanning_matrix(theta, w), compute_uv=False)
    top = float(s[0]) if s.size else 0.0
    rank = int(np.sum(s > RANK_RTOL * top)) if top > 0 else 0
    return EtaleResult(rank == theta.m, tuple(float(v) for v in s), rank, theta.trace_residual())


# --- sl(2) ------------------------------------------------------------------------

SL2_BASIS = np.array([
    [[1.0, 0.0], [0.0, -1.0]],  # H
    [[0.0, 1.0], [0.0, 0.0]],   # E+
    [[0.0, 0.0], [1.0, 0.0]],   # E-
])


def sl2_algebra() -> LieAlgebra:
    """[H, E+] = 2 E+, [H, E-] = -2 E-, [E+, E-] = H."""
    return LieAlgebra.from_brackets(3, {(0, 1): [0, 2, 0], (0, 2): [0, 0, -2], (1, 2): [1, 0, 0]})


def _block(u, corner):
    out = np.zeros((4, 4))
    out[:2, :2] = u
    out[2:, 2:] = corner
    return out


def sl2_block_rep(variant: str = "printed") -> LinearRep:
    """u -> blockdiag(u, E) with E = diag(0, 1) (``printed``) or blockdiag(u, 0) (``offset``).

    The printed map is affine in u, so its bracket and trace residuals are nonzero.
    """
    if variant not in ("printed", "offset"):
        raise ValueError(f"unknown variant {variant!r}")
    corner = np.diag([0.0, 1.0]) if variant == "printed" else np.zeros((2, 2))
    return LinearRep(np.stack([_block(u, corner) for u in SL2_BASIS]), sl2_algebra(), f"sl2-block-{variant}")


def sl2_left_regular_rep() -> LinearRep:
    """sl(2) acting on M2(R) = R^4 (row-major) by left multiplication."""
    mats = [np.kron(u, np.eye(2)) for u in SL2_BASIS]
    return LinearRep(np.stack(mats), sl2_algebra(), "sl2-left-regular")


def sl2_report(tol: float = 1e-9) -> dict:
    out = {}
    for name, rep, w in (("printed", sl2_block_rep("printed"), [0, 0, 1, 0]),
                         ("offset", sl2_block_rep("offset"), [0, 0, 1, 0]),
                         ("left_regular", sl2_left_regular_rep(), [1, 0, 0, 1])):
        r = projective_etale_check(rep, w, tol)
        out[name] = {"w": list(map(float, w)), "etale": r.ok, "rank": r.rank,
                     "singular_values": list(r.singular_values), "trace_residual": r.trace_residual,
                     "bracket_residual": rep.bracket_residual()}
    return out


# --- trace-zero subalgebras ---------------------------------------------------------

def matrix_algebra(n: int) -> BilinearProduct:
    """M_n(R) with matrix multiplication, basis E_ij row-major."""
    d = n * n
    g = np.zeros((d, d, d))
    for i in range(n):
        for j in range(n):
            for l in range(n):
                g[i * n + j, j * n + l, i * n + l] = 1.0
    return BilinearProduct(g)


@dataclass(frozen=True)
class TraceZeroResult:
    basis: np.ndarray
    closure_residual: float
    closed: bool

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def trace_zero_subalgebra(prod: BilinearProduct, tol: float = 1e-9) -> TraceZeroResult:
    """Kernel of a -> tr L_a, with a check that commutators stay inside it."""
    if not is_associative(prod, tol):
        raise ValueError("trace_zero_subalgebra needs an associative product")
    n = prod.dim
    tau = np.array([np.trace(left_mult(prod, np.eye(n)[i])) for i in range(n)], dtype=float)
    if np.max(np.abs(tau)) <= tol:
        basis = np.eye(n)
    else:
        _, _, vt = np.linalg.svd(tau[None, :])
        basis = vt[1:]
    worst = 0.0
    for a in basis:
        for b in basis:
            comm = prod.mul(a, b) - prod.mul(b, a)
            worst = max(worst, abs(float(np.asarray(comm, dtype=float) @ tau)))
    return TraceZeroResult(basis, worst, worst <= tol)
