"""The variety of left-symmetric products on aff(R) and its isomorphism classes.

A variety point (alpha, beta, gamma, delta, eps, lam) encodes

    e1.e1 = alpha e1 + beta e2      e1.e2 = gamma e1 + (delta + 1) e2
    e2.e1 = gamma e1 + delta e2     e2.e2 = eps e1 + lam e2
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

import numpy as np
from scipy.optimize import least_squares

from .algebra import BilinearProduct, basis, left_mult, right_traces

SPECIAL_TAGS = ("complete", "bi-invariant", "Hessian", "Lorentzian", "symplectic-connection",
                "coadjoint-symplectic")
FAMILIES = ("F1", "F2", "A1", "A2", "R1", "R2")


@dataclass(frozen=True)
class VarietyPoint:
    alpha: float
    beta: float
    gamma: float
    delta: float
    eps: float
    lam: float

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma, self.delta, self.eps, self.lam)

    @classmethod
    def of(cls, p) -> "VarietyPoint":
        if isinstance(p, VarietyPoint):
            return p
        vals = tuple(p)
        if len(vals) != 6:
            raise ValueError(f"a variety point has 6 coordinates, got {len(vals)}")
        return cls(*vals)


@dataclass(frozen=True)
class FamilyTag:
    component: str
    family: str
    parameter: float | None = None
    special: tuple = ()

    def label(self) -> str:
        return f"{self.family}({_fmt(self.parameter)})" if self.parameter is not None else self.family

    def to_dict(self) -> dict:
        return {"component": self.component, "family": self.family, "parameter": self.parameter,
                "label": self.label(), "special": list(self.special)}


@dataclass(frozen=True)
class OffVariety:
    residual: tuple

    def __bool__(self):
        return False


def _fmt(x):
    if x is None:
        return ""
    f = Fraction(x).limit_denominator(1000)
    return str(f) if abs(float(f) - x) < 1e-12 else repr(x)


# --- products -----------------------------------------------------------------

def point_to_product(p) -> BilinearProduct:
    a, b, c, d, e, l = VarietyPoint.of(p).as_tuple()
    return BilinearProduct.from_table(2, {
        (0, 0): [a, b],
        (0, 1): [c, d + 1],
        (1, 0): [c, d],
        (1, 1): [e, l],
    })


def product_to_point(prod: BilinearProduct) -> tuple[VarietyPoint, float]:
    """Read off variety coordinates; the second value is the torsion residual against aff(R)."""
    g = np.asarray(prod.gamma, dtype=float)
    if g.shape != (2, 2, 2):
        raise ValueError("variety points describe 2-dim products")
    point = VarietyPoint(g[0, 0, 0], g[0, 0, 1], g[1, 0, 0], g[1, 0, 1], g[1, 1, 0], g[1, 1, 1])
    torsion = g - g.transpose(1, 0, 2)
    torsion[0, 1, 1] -= 1.0
    torsion[1, 0, 1] += 1.0
    return point, float(np.max(np.abs(torsion)))


def variety_residual(p) -> np.ndarray:
    a, b, c, d, e, l = VarietyPoint.of(p).as_tuple()
    return np.array([
        b * e - c * d + c,
        a * d - b * c + b * l - d * d,
        a * e - c * c + c * l - d * e - 2 * e,
        b * e - c * d - l,
    ])


def component_I(alpha, beta) -> VarietyPoint:
    return VarietyPoint(alpha, beta, 0.0, 0.0, 0.0, 0.0)


def component_II(alpha, beta) -> VarietyPoint:
    return VarietyPoint(alpha, beta, 0.0, alpha, 0.0, 0.0)


def component_III(gamma, eps) -> VarietyPoint:
    if eps == 0:
        raise ValueError("Component III needs eps != 0")
    return VarietyPoint(2 + gamma**2 / eps, (-gamma**3 - gamma * eps) / eps**2, gamma,
                        -gamma**2 / eps, eps, -gamma)


def F_I(alpha, beta) -> BilinearProduct:
    return point_to_product(component_I(alpha, beta))


def F_II(alpha, beta) -> BilinearProduct:
    return point_to_product(component_II(alpha, beta))


def F1(alpha) -> BilinearProduct:
    """e1.e1 = alpha e1 + alpha e2, e1.e2 = e2."""
    return F_I(alpha, alpha)


def F2(alpha) -> BilinearProduct:
    """e1.e1 = alpha e1 - alpha e2, e1.e2 = (alpha+1) e2, e2.e1 = alpha e2."""
    return F_II(alpha, -alpha)


def A1() -> BilinearProduct:
    return BilinearProduct.from_table(2, {(0, 0): [1, 0], (0, 1): [0, 1]})


def A2() -> BilinearProduct:
    return BilinearProduct.from_table(2, {(0, 0): [-1, 0], (1, 0): [0, -1]})


def R1() -> BilinearProduct:
    return BilinearProduct.from_table(2, {(0, 0): [2, 0], (0, 1): [0, 1], (1, 1): [1, 0]})


def R2() -> BilinearProduct:
    return BilinearProduct.from_table(2, {(0, 0): [2, 0], (0, 1): [0, 1], (1, 1): [-1, 0]})


def family_product(family: str, alpha=None) -> BilinearProduct:
    family = family.upper()
    if family in ("F1", "F2"):
        if alpha is None:
            raise ValueError(f"{family} needs a parameter")
        if family == "F2" and alpha == 0:
            raise ValueError("F2(0) lies on Component I; use F1(0)")
        return F1(alpha) if family == "F1" else F2(alpha)
    table = {"A1": A1, "A2": A2, "R1": R1, "R2": R2}
    if family not in table:
        raise ValueError(f"unknown family {family!r}")
    return table[family]()


# class-level properties (attached to the canonical representative)
def _special(family, alpha):
    tags = set()
    if family == "F1" and alpha == 0:
        tags.add("complete")
    if family in ("A1", "A2"):
        tags.add("bi-invariant")
    if family == "A2":
        tags.add("coadjoint-symplectic")
    if (family == "F1" and alpha == -1) or (family == "F2" and alpha == -2) or family in ("R1", "R2"):
        tags.add("Hessian")
    if family == "F1" and alpha == -1:
        tags.add("Lorentzian")
    if (family == "F1" and alpha == -1) or (family == "F2" and alpha == -0.5):
        tags.add("symplectic-connection")
    return tuple(t for t in SPECIAL_TAGS if t in tags)


def make_tag(component, family, alpha=None) -> FamilyTag:
    param = float(alpha) if family in ("F1", "F2") else None
    return FamilyTag(component, family, param, _special(family, param))


def classify(p, tol: float = 1e-9) -> FamilyTag | OffVariety:
    """Component membership, isomorphism class and special tags.

    Component I wins on the I/II intersection line alpha = delta = 0.
    """
    p = VarietyPoint.of(p)
    res = variety_residual(p)
    if np.max(np.abs(res)) > tol:
        return OffVariety(tuple(float(r) for r in res))
    a, b, c, d, e, l = p.as_tuple()
    z = lambda v: abs(v) <= tol
    if z(c) and z(d) and z(e) and z(l):
        if z(a - 1):
            return make_tag("I", "A1") if z(b) else make_tag("I", "F1", 1.0)
        return make_tag("I", "F1", _snap(a, tol))
    if z(c) and z(e) and z(l) and z(d - a):
        if z(a + 1):
            return make_tag("II", "A2") if z(b) else make_tag("II", "F2", -1.0)
        return make_tag("II", "F2", _snap(a, tol))
    if not z(e):
        return make_tag("III", "R1" if e > 0 else "R2")
    # on V but outside the parameterizations cannot happen; keep the residual honest
    return OffVariety(tuple(float(r) for r in res))  # pragma: no cover


def _snap(x, tol=1e-12):
    """Round to the nearest quarter when within tol, so tags compare cleanly."""
    r = round(x * 4) / 4
    return r if abs(r - x) <= tol else float(x)


def canonical_representative(p_or_tag) -> BilinearProduct:
    tag = p_or_tag if isinstance(p_or_tag, FamilyTag) else classify(p_or_tag)
    if isinstance(tag, OffVariety):
        raise ValueError(f"point is off the variety (residual {tag.residual})")
    return family_product(tag.family, tag.parameter)


# --- isomorphism ----------------------------------------------------------------

def translation_subspace(prod: BilinearProduct, tol: float = 1e-10) -> np.ndarray:
    """Basis (rows) of N = {x : L_x = 0}."""
    n = prod.dim
    m = np.stack([left_mult(prod, basis(n, i)).ravel() for i in range(n)], axis=1)
    _, s, vt = np.linalg.svd(m)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return vt[rank:]


def trace_form(prod: BilinearProduct) -> np.ndarray:
    """q(x, y) = tau(x.y + y.x) / 2 with tau(x) = tr R_x."""
    tau = right_traces(prod)
    g = np.asarray(prod.gamma, dtype=float)
    return 0.5 * (np.einsum("ijk,k->ij", g, tau) + np.einsum("jik,k->ij", g, tau))


def signature(sym: np.ndarray, tol: float = 1e-9) -> tuple[int, int]:
    w = np.linalg.eigvalsh(sym)
    return int(np.sum(w > tol)), int(np.sum(w < -tol))


def invariants(prod: BilinearProduct) -> dict:
    """Isomorphism invariants: dim N(g), completeness, signature of the trace form."""
    tr = right_traces(prod)
    return {
        "dim_N": int(translation_subspace(prod).shape[0]),
        "complete": bool(np.all(np.abs(tr) <= 1e-10)),
        "trace_form_signature": list(signature(trace_form(prod))),
    }


@dataclass(frozen=True)
class IsoResult:
    ok: bool
    P: np.ndarray | None = None
    residual: float = float("inf")
    invariants: tuple = field(default_factory=tuple)

    def __bool__(self):
        return self.ok


def _iso_equations(P, g1, g2):
    # P(e_i . e_j) - P(e_i) . P(e_j)
    lhs = np.einsum("ijm,km->ijk", g1, P)
    rhs = np.einsum("ai,bj,abk->ijk", P, P, g2)
    return (lhs - rhs).ravel()


def lsa_isomorphic(p1: BilinearProduct, p2: BilinearProduct, tol: float = 1e-10,
                   det_tol: float = 1e-8, grid=(-3.0, 0.25, 3.0)) -> IsoResult:
    """Search invertible P with P(x.y) = P(x).P(y).

    Columns of P are images of basis vectors.  "no" is a bounded-search verdict;
    the invariants of both products are returned alongside it.
    """
    if p1.dim != p2.dim:
        return IsoResult(False)
    n = p1.dim
    g1 = np.asarray(p1.gamma, dtype=float)
    g2 = np.asarray(p2.gamma, dtype=float)
    inv = (invariants(p1), invariants(p2))
    best = float("inf")
    for start in iproduct(grid, repeat=n * n):
        sol = least_squares(lambda v: _iso_equations(v.reshape(n, n), g1, g2), np.array(start),
                            method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        P = sol.x.reshape(n, n)
        r = float(np.max(np.abs(_iso_equations(P, g1, g2))))
        best = min(best, r)
        if r <= tol and abs(np.linalg.det(P)) > det_tol:
            return IsoResult(True, P, r, inv)
    return IsoResult(False, None, best, inv)


# --- the atlas ------------------------------------------------------------------

ATLAS_ALPHAS = {
    "F1": (-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0),
    "F2": (-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0),
}


def canonical_point(family: str, alpha=None) -> VarietyPoint:
    """Variety coordinates of the displayed canonical product."""
    return {
        "F1": lambda: component_I(alpha, alpha),
        "F2": lambda: component_II(alpha, -alpha),
        "A1": lambda: component_I(1.0, 0.0),
        "A2": lambda: component_II(-1.0, 0.0),
        "R1": lambda: component_III(0.0, 1.0),
        "R2": lambda: component_III(0.0, -1.0),
    }[family]()


def atlas_members():
    """(family, alpha, product) for the sampled atlas: both families on the test grid plus the four extras."""
    out = []
    for fam in ("F1", "F2"):
        for a in ATLAS_ALPHAS[fam]:
            out.append((fam, a, family_product(fam, a)))
    for fam in ("A1", "A2", "R1", "R2"):
        out.append((fam, None, family_product(fam)))
    return out


# --- sampling -------------------------------------------------------------------

def sample_component(component: str, rng: np.random.Generator, n: int) -> list[VarietyPoint]:
    """Parameter draws in [-3, 3]; Component III keeps |eps| in [0.5, 3] so entries stay O(100)."""
    if component == "I":
        return [component_I(*rng.uniform(-3, 3, 2)) for _ in range(n)]
    if component == "II":
        return [component_II(*rng.uniform(-3, 3, 2)) for _ in range(n)]
    if component == "III":
        out = []
        for _ in range(n):
            e = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 3))
            out.append(component_III(float(rng.uniform(-3, 3)), e))
        return out
    raise ValueError(f"unknown component {component!r}")


def sample_off_variety(rng: np.random.Generator, n: int, margin: float = 1e-3) -> list[VarietyPoint]:
    """Uniform points of [-3, 3]^6 whose residual norm exceeds ``margin``."""
    out = []
    while len(out) < n:
        p = VarietyPoint(*rng.uniform(-3, 3, 6).tolist())
        if np.linalg.norm(variety_residual(p)) > margin:
            out.append(p)
    return out
