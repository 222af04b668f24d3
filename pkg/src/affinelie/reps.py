"""Etale affine representations of Aff(R)_0 = {(x, y) : x > 0} and their checks.

Group law (a, b)(c, d) = (ac, ad + b).  Matrices are 3x3 homogeneous affine
maps of aff(R) = R^2 with last row (0, 0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import BilinearProduct, Verdict, left_mult
from .atlas import family_product

FAMILIES = ("f1", "f2", "a1", "a2", "r1", "r2")


def group_mul(g1, g2):
    (a, b), (c, d) = g1, g2
    return (a * c, a * d + b)


def group_inv(g):
    a, b = g
    return (1.0 / a, -b / a)


def group_exp(v):
    a, b = v
    if a == 0:
        return (1.0, float(b))
    return (math.exp(a), b / a * math.expm1(a))


def _h(m11, m12, q1, m21, m22, q2):
    return np.array([[m11, m12, q1], [m21, m22, q2], [0.0, 0.0, 1.0]])


def _rho_f1(alpha):
    if alpha == 0:
        return lambda x, y: _h(1.0, 0.0, math.log(x), 0.0, x, y)
    if alpha == 1:
        return lambda x, y: _h(x, 0.0, x - 1, x * math.log(x), x, 1 + y + x * (math.log(x) - 1))

    def f(x, y):
        xa = x**alpha
        return _h(xa, 0.0, (xa - 1) / alpha,
                  alpha / (alpha - 1) * (xa - x), x, y + (xa - alpha * x) / (alpha - 1) + 1)
    return f


def _rho_f2(alpha):
    if alpha == 0:
        raise ValueError("F2(0) is not a member of the F2 family")
    if alpha == -1:
        return lambda x, y: _h(1 / x, 0.0, 1 - 1 / x, 1 - y / x - 1 / x, 1.0, 1 / x + y / x - 1 + math.log(x))

    def f(x, y):
        xa = x**alpha
        return _h(xa, 0.0, (xa - 1) / alpha,
                  alpha * xa * (y - x + 1), x ** (alpha + 1),
                  xa * (y + 1) - (alpha * x ** (alpha + 1) + 1) / (alpha + 1))
    return f


_FIXED = {
    "a1": lambda x, y: _h(x, 0.0, x - 1, 0.0, x, y),
    "a2": lambda x, y: _h(1 / x, 0.0, 1 - 1 / x, -y / x, 1.0, y / x),
    "r1": lambda x, y: _h(x * x, x * y, 0.5 * (x * x + y * y - 1), 0.0, x, y),
    "r2": lambda x, y: _h(x * x, -x * y, 0.5 * (x * x - y * y - 1), 0.0, x, y),
}


@dataclass(frozen=True)
class AffineRep:
    family: str
    alpha: float | None
    fn: Callable

    def __call__(self, x, y) -> np.ndarray:
        if not x > 0:
            raise ValueError(f"x must be positive, got {x}")
        return self.fn(x, y)

    def label(self) -> str:
        return f"{self.family}({self.alpha:g})" if self.alpha is not None else self.family

    def product(self) -> BilinearProduct:
        """The canonical product this representation is paired with."""
        return family_product(self.family.upper(), self.alpha)


def rho(family: str, alpha=None) -> AffineRep:
    fam = family.lower()
    if fam == "f1":
        if alpha is None:
            raise ValueError("f1 needs alpha")
        return AffineRep(fam, float(alpha), _rho_f1(float(alpha)))
    if fam == "f2":
        if alpha is None:
            raise ValueError("f2 needs alpha")
        return AffineRep(fam, float(alpha), _rho_f2(float(alpha)))
    if fam in _FIXED:
        return AffineRep(fam, None, _FIXED[fam])
    raise ValueError(f"unknown family {family!r}")


def all_reps(alphas=(-3.0, -2.0, -0.5, 0.5, 2.0, 3.0)):
    """Every displayed formula: generic f1/f2 over ``alphas`` plus the dedicated parameter values."""
    out = [rho("f1", a) for a in alphas] + [rho("f1", 1.0), rho("f1", 0.0)]
    out += [rho("f2", a) for a in alphas] + [rho("f2", -1.0)]
    out += [rho(f) for f in ("a1", "a2", "r1", "r2")]
    return out


def sample_elements(rng: np.random.Generator, n: int):
    xs = np.exp(rng.uniform(-2, 2, n))
    ys = rng.uniform(-3, 3, n)
    return list(zip(xs.tolist(), ys.tolist()))


def verify_homomorphism(rep, samples: int = 100, tol: float = 1e-9, seed: int = 0) -> Verdict:
    """max over random pairs of the entrywise residual of rep(g1 g2) = rep(g1) rep(g2).

    The residual is relative to max(1, max-abs entry of rep(g1 g2)): power-law entries reach
    e^16 on the sampling box, where absolute rounding alone is ~1e-9.
    """
    rng = np.random.default_rng(seed)
    g1s, g2s = sample_elements(rng, samples), sample_elements(rng, samples)
    worst, witness = 0.0, None
    for g1, g2 in zip(g1s, g2s):
        lhs = rep(*group_mul(g1, g2))
        r = float(np.max(np.abs(lhs - rep(*g1) @ rep(*g2)))) / max(1.0, float(np.max(np.abs(lhs))))
        if witness is None or r > worst:
            worst, witness = r, (g1, g2)
    ident = float(np.max(np.abs(rep(1.0, 0.0) - np.eye(3))))
    return Verdict(worst <= tol and ident <= tol, {"homomorphism": worst, "identity": ident}, witness)


def theta(prod: BilinearProduct):
    """a -> homogeneous matrix of (a, L_a)."""
    def th(a):
        a = np.asarray(a, dtype=float)
        m = np.zeros((prod.dim + 1, prod.dim + 1))
        m[:-1, :-1] = left_mult(prod, a)
        m[:-1, -1] = a
        return m
    return th


def _richardson(f, h):
    d = lambda s: (f(s) - f(-s)) / (2 * s)
    return (4 * d(h / 2) - d(h)) / 3


def rep_derivative(rep, i: int, h: float = 1e-6) -> np.ndarray:
    """d/dt rep(exp(t e_i)) at t = 0."""
    e = np.eye(2)[i]
    return _richardson(lambda t: rep(*group_exp(t * e)), h)


def verify_derivative(rep, prod: BilinearProduct, tol: float = 1e-6, h: float = 1e-6) -> bool:
    return derivative_residual(rep, prod, h) <= tol


def derivative_residual(rep, prod: BilinearProduct, h: float = 1e-6) -> float:
    th = theta(prod)
    return max(float(np.max(np.abs(rep_derivative(rep, i, h) - th(np.eye(2)[i])))) for i in range(2))


def developing_map(rep):
    """sigma -> translation column Q(sigma)."""
    return lambda x, y: rep(x, y)[:2, 2]


def developing_jacobian(rep, at=(1.0, 0.0), h: float = 1e-6) -> np.ndarray:
    Q = developing_map(rep)
    x0, y0 = at
    jx = _richardson(lambda s: Q(x0 + s, y0), h)
    jy = _richardson(lambda s: Q(x0, y0 + s), h)
    return np.column_stack([jx, jy])


def etale_check(rep, tol: float = 1e-6) -> bool:
    return abs(np.linalg.det(developing_jacobian(rep))) > tol
