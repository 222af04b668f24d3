"""Lie algebras, bilinear products and the left-symmetric axioms.

Conventions: ``c[i, j, k]`` is the coefficient of e_k in [e_i, e_j] and
``gamma[i, j, k]`` the coefficient of e_k in e_i . e_j.  Indices are 0-based
in code; e1, e2, ... in docstrings are 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import numpy as np

from . import kernels


def _frozen(a, dtype=None) -> np.ndarray:
    arr = np.array(a, dtype=dtype if dtype is not None else (object if _has_fraction(a) else float))
    arr.setflags(write=False)
    return arr


def _has_fraction(a) -> bool:
    arr = np.asarray(a)
    if arr.dtype == object:
        return True
    return False


@dataclass(frozen=True)
class Verdict:
    """Pass/fail outcome with the residuals that decided it."""

    ok: bool
    residuals: dict = field(default_factory=dict)
    witness: Any = None

    def __bool__(self) -> bool:
        return bool(self.ok)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    c: np.ndarray

    def __post_init__(self):
        c = _frozen(self.c)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise ValueError(f"structure constants must have shape (n,n,n), got {c.shape}")
        if _maxabs(c + c.transpose(1, 0, 2)) > 1e-12:
            raise ValueError("structure constants are not antisymmetric")
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @classmethod
    def from_brackets(cls, dim: int, brackets: Mapping[tuple, Any]) -> "LieAlgebra":
        """Build from ``{(i, j): vector}`` for [e_i, e_j], 0-based; antisymmetric partners are filled in."""
        exact = any(isinstance(v, Fraction) for vec in brackets.values() for v in np.ravel(vec))
        c = np.zeros((dim, dim, dim), dtype=object if exact else float)
        if exact:
            c[...] = Fraction(0)
        for (i, j), vec in brackets.items():
            c[i, j, :] = vec
            c[j, i, :] = -np.asarray(vec)
        return cls(c)

    @classmethod
    def abelian(cls, dim: int) -> "LieAlgebra":
        return cls(np.zeros((dim, dim, dim)))

    def jacobi_residual(self):
        c = self.c
        # sum_m c_ij^m c_mk^l + cyclic
        t = np.einsum("ijm,mkl->ijkl", c, c)
        jac = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return _maxabs(jac)

    def bracket(self, x, y):
        return bracket(self, x, y)

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.c.shape == other.c.shape and bool(np.all(self.c == other.c))

    def __hash__(self):
        return hash(self.c.tobytes()) if self.c.dtype != object else hash(tuple(self.c.ravel()))


@dataclass(frozen=True, eq=False)
class BilinearProduct:
    gamma: np.ndarray

    def __post_init__(self):
        g = _frozen(self.gamma)
        if g.ndim != 3 or not (g.shape[0] == g.shape[1] == g.shape[2]):
            raise ValueError(f"product coefficients must have shape (n,n,n), got {g.shape}")
        object.__setattr__(self, "gamma", g)

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    @classmethod
    def from_table(cls, dim: int, table: Mapping[tuple, Any]) -> "BilinearProduct":
        """Build from ``{(i, j): vector}`` for e_i . e_j, 0-based; missing entries are zero."""
        exact = any(isinstance(v, Fraction) for vec in table.values() for v in np.ravel(vec))
        g = np.zeros((dim, dim, dim), dtype=object if exact else float)
        if exact:
            g[...] = Fraction(0)
        for (i, j), vec in table.items():
            g[i, j, :] = vec
        return cls(g)

    @classmethod
    def zero(cls, dim: int) -> "BilinearProduct":
        return cls(np.zeros((dim, dim, dim)))

    def mul(self, x, y):
        return np.einsum("i,j,ijk->k", np.asarray(x), np.asarray(y), self.gamma)

    def commutator_algebra(self) -> LieAlgebra:
        return LieAlgebra(self.gamma - self.gamma.transpose(1, 0, 2))

    def exact(self) -> "BilinearProduct":
        return BilinearProduct(to_fraction(self.gamma))

    def __eq__(self, other):
        return isinstance(other, BilinearProduct) and self.gamma.shape == other.gamma.shape and bool(
            np.all(self.gamma == other.gamma))

    def __hash__(self):
        return hash(self.gamma.tobytes()) if self.gamma.dtype != object else hash(tuple(self.gamma.ravel()))


def to_fraction(a) -> np.ndarray:
    """Float array -> object array of Fractions (exact for dyadic and small-denominator inputs)."""
    arr = np.asarray(a)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = v if isinstance(v, Fraction) else Fraction(v).limit_denominator(10**9)
    return out


def _maxabs(a):
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    if a.dtype == object:
        return max(abs(v) for v in a.ravel())
    return float(np.max(np.abs(a)))


def _check_dims(*dims):
    if len(set(dims)) != 1:
        raise ValueError(f"dimension mismatch: {dims}")


def basis(dim: int, i: int) -> np.ndarray:
    e = np.zeros(dim)
    e[i] = 1.0
    return e


def aff_r() -> LieAlgebra:
    """aff(R) with [e1, e2] = e2."""
    return LieAlgebra.from_brackets(2, {(0, 1): [0.0, 1.0]})


def bracket(alg: LieAlgebra, x, y) -> np.ndarray:
    x, y = np.asarray(x), np.asarray(y)
    _check_dims(alg.dim, x.shape[0], y.shape[0])
    return np.einsum("i,j,ijk->k", x, y, alg.c)


def is_left_symmetric(prod: BilinearProduct, alg: LieAlgebra, tol: float = 1e-12) -> Verdict:
    _check_dims(prod.dim, alg.dim)
    sym, tors = kernels.lsa_residuals(prod.gamma, alg.c)
    return Verdict(sym <= tol and tors <= tol, {"associator_symmetry": sym, "torsion": tors})


def associator(prod: BilinearProduct, x, y, z) -> np.ndarray:
    return prod.mul(prod.mul(x, y), z) - prod.mul(x, prod.mul(y, z))


def is_associative(prod: BilinearProduct, tol: float = 1e-12) -> Verdict:
    r = kernels.assoc_residual(prod.gamma)
    return Verdict(r <= tol, {"associator": r})


def left_mult(prod: BilinearProduct, a) -> np.ndarray:
    """Matrix of b -> a . b (column j is a . e_j)."""
    a = np.asarray(a)
    _check_dims(prod.dim, a.shape[0])
    return np.einsum("i,ijk->kj", a, prod.gamma)


def right_mult(prod: BilinearProduct, a) -> np.ndarray:
    """Matrix of b -> b . a (column i is e_i . a)."""
    a = np.asarray(a)
    _check_dims(prod.dim, a.shape[0])
    return np.einsum("j,ijk->ki", a, prod.gamma)


def right_traces(prod: BilinearProduct) -> np.ndarray:
    return np.array([np.trace(right_mult(prod, basis(prod.dim, i))) for i in range(prod.dim)])


def is_complete(prod: BilinearProduct, tol: float = 1e-12) -> bool:
    # tr R_b is linear in b, so basis vectors suffice
    return bool(np.all(np.abs(right_traces(prod)) <= tol))


# --- explicit constructions ---------------------------------------------------

def _unit_matrix(n, r, s):
    m = np.zeros((n, n))
    m[r, s] = 1.0
    return m


def _split_aff(v, n):
    return v[:n], v[n:].reshape(n, n)


def aff_rn_product(n: int) -> BilinearProduct:
    """(a, f) . (b, g) = (f b, f g) on R^n + gl(n); basis: vector part, then f row-major."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = n + n * n
    g = np.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            a, f = _split_aff(basis(d, i), n)
            b, h = _split_aff(basis(d, j), n)
            g[i, j] = np.concatenate([f @ b, (f @ h).ravel()])
    return BilinearProduct(g)


def aff_rn_algebra(n: int) -> LieAlgebra:
    """aff(R^n): [(a, f), (b, g)] = (f b - g a, [f, g])."""
    d = n + n * n
    c = np.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            a, f = _split_aff(basis(d, i), n)
            b, h = _split_aff(basis(d, j), n)
            c[i, j] = np.concatenate([f @ b - h @ a, (f @ h - h @ f).ravel()])
    return LieAlgebra(c)


def gl_gl_product(n: int) -> BilinearProduct:
    """(t1, s1) . (t2, s2) = (t1 t2 + t1 s2 + s1 t2, s1 s2) on gl(n) + gl(n); basis t then s, row-major."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = 2 * n * n
    g = np.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            g[i, j] = _gl_gl_corrected(basis(d, i), basis(d, j), n)
    return BilinearProduct(g)


def _gl_pair(v, n):
    return v[: n * n].reshape(n, n), v[n * n:].reshape(n, n)


def _gl_gl_corrected(u, v, n):
    t1, s1 = _gl_pair(u, n)
    t2, s2 = _gl_pair(v, n)
    return np.concatenate([(t1 @ t2 + t1 @ s2 + s1 @ t2).ravel(), (s1 @ s2).ravel()])


def gl_gl_printed(u, v, n: int) -> np.ndarray:
    """Second slot as printed, s1 t1; this map is not bilinear, so it is not a BilinearProduct."""
    t1, s1 = _gl_pair(np.asarray(u, dtype=float), n)
    t2, s2 = _gl_pair(np.asarray(v, dtype=float), n)
    return np.concatenate([(t1 @ t2 + t1 @ s2 + s1 @ t2).ravel(), (s1 @ t1).ravel()])


def gl_gl_printed_report(n: int, seed: int = 0, trials: int = 200, tol: float = 1e-9) -> dict:
    """Brute-force bilinearity and associativity verdicts for the printed second slot."""
    rng = np.random.default_rng(seed)
    d = 2 * n * n
    mul = lambda u, v: gl_gl_printed(u, v, n)
    worst_lin = worst_assoc = 0.0
    lin_witness = assoc_witness = None
    for _ in range(trials):
        u, v, w = rng.standard_normal((3, d))
        lam = rng.standard_normal()
        # right-linearity: u.(v + lam w) = u.v + lam u.w
        r = float(np.max(np.abs(mul(u, v + lam * w) - mul(u, v) - lam * mul(u, w))))
        # left-linearity
        r = max(r, float(np.max(np.abs(mul(v + lam * w, u) - mul(v, u) - lam * mul(w, u)))))
        if r > worst_lin:
            worst_lin, lin_witness = r, (u.tolist(), v.tolist(), w.tolist(), lam)
        a = float(np.max(np.abs(mul(mul(u, v), w) - mul(u, mul(v, w)))))
        if a > worst_assoc:
            worst_assoc, assoc_witness = a, (u.tolist(), v.tolist(), w.tolist())
    unit = np.concatenate([np.zeros(n * n), np.eye(n).ravel()])
    x = rng.standard_normal(d)
    unit_res = max(float(np.max(np.abs(mul(unit, x) - x))), float(np.max(np.abs(mul(x, unit) - x))))
    return {
        "n": n,
        "bilinear": worst_lin <= tol,
        "bilinearity_residual": worst_lin,
        "associative": worst_assoc <= tol,
        "associator_residual": worst_assoc,
        "unit_residual": unit_res,
        "bilinearity_witness": lin_witness,
        "associativity_witness": assoc_witness,
    }


def semidirect_lsa(n_prod: BilinearProduct, h_prod: BilinearProduct, action) -> BilinearProduct:
    """(n1, h1) . (n2, h2) = (n1 n2 + ad_{h1} n2, h1 h2); ``action[a]`` is the matrix of ad_{h_a} on n."""
    action = np.asarray(action, dtype=float)
    dn, dh = n_prod.dim, h_prod.dim
    if action.shape != (dh, dn, dn):
        raise ValueError(f"action must have shape {(dh, dn, dn)}, got {action.shape}")
    d = dn + dh
    g = np.zeros((d, d, d))
    g[:dn, :dn, :dn] = n_prod.gamma
    g[dn:, dn:, dn:] = h_prod.gamma
    for a in range(dh):
        for j in range(dn):
            g[dn + a, j, :dn] = action[a][:, j]
    return BilinearProduct(g)


# --- JSON ---------------------------------------------------------------------

def _sparse(arr):
    return [[i, j, k, float(v)] for (i, j, k), v in np.ndenumerate(np.asarray(arr, dtype=float)) if v != 0]


def _dense(dim, triples, what):
    a = np.zeros((dim, dim, dim))
    for entry in triples:
        if len(entry) != 4:
            raise ValueError(f"{what} entries must be [i, j, k, value]")
        i, j, k, v = entry
        a[int(i), int(j), int(k)] = float(v)
    return a


def to_json(alg: LieAlgebra | None = None, prod: BilinearProduct | None = None) -> dict:
    dims = [x.dim for x in (alg, prod) if x is not None]
    if not dims:
        raise ValueError("nothing to serialize")
    _check_dims(*dims)
    doc: dict = {"dim": dims[0]}
    if alg is not None:
        doc["bracket"] = _sparse(alg.c)
    if prod is not None:
        doc["product"] = _sparse(prod.gamma)
    return doc


def from_json(doc: dict | str) -> tuple[LieAlgebra | None, BilinearProduct | None]:
    if isinstance(doc, str):
        doc = json.loads(doc)
    dim = int(doc["dim"])
    if dim < 1:
        raise ValueError("dim must be positive")
    alg = LieAlgebra(_dense(dim, doc["bracket"], "bracket")) if "bracket" in doc else None
    prod = BilinearProduct(_dense(dim, doc["product"], "product")) if "product" in doc else None
    return alg, prod
