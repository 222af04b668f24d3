"""Geodesics of left-invariant connections on Aff(R)_0.

Three formulations of the geodesic equation for a product with frame
coefficients Gamma^k_ij (e_i^+ = x d/dx direction for i = 1, x d/dy for i = 2):

* ``frame``: x' = x v1, y' = x v2, v_k' = -Gamma^k_ij v_i v_j.
* ``coordinate``: q_k'' = -C^k_ij q_i' q_j' with C^k_ij = (Gamma^k_ij - delta_i1 delta_jk) / x.
* ``literal``: q_k'' = -Gamma^k_ij q_i' q_j', the frame symbols used as constant
  coordinate Christoffels.

The first two describe the same curves (``true`` geodesics).  The displayed
closed forms (variant ``printed``) solve the literal system; variant
``developed`` gives the true geodesics through the developing map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .algebra import BilinearProduct, is_complete
from .atlas import family_product
from .reps import developing_map, rho

FORMULATIONS = {"frame": kernels.FRAME, "coordinate": kernels.COORDINATE, "literal": kernels.LITERAL}
STATUS = {kernels.OK: "ok", kernels.BLOWUP: "blowup", kernels.UNDERFLOW: "underflow",
          kernels.MAXSTEPS: "max_steps"}
VARIANTS = ("printed", "corrected", "developed")


def frame_ode(prod: BilinearProduct) -> Callable:
    """RHS f(t, s) for s = (x, y, v1, v2)."""
    g = np.asarray(prod.gamma, dtype=float)
    if g.shape != (2, 2, 2):
        raise ValueError("frame ODE is defined for 2-dim products on aff(R)")

    def f(t, s):
        x, y, v1, v2 = s
        v = np.array([v1, v2])
        acc = -np.einsum("i,j,ijk->k", v, v, g)
        return np.array([x * v1, x * v2, acc[0], acc[1]])
    return f


def coordinate_christoffels(prod: BilinearProduct, x: float) -> np.ndarray:
    """C[i, j, k] = (Gamma^k_ij - delta_i1 delta_jk) / x."""
    g = np.asarray(prod.gamma, dtype=float)
    C = g.copy()
    C[0] -= np.eye(2)
    return C / x


def geodesic_residual(prod: BilinearProduct, formulation: str, q, dq, ddq) -> np.ndarray:
    """q'' + C(q)(q', q') for coordinate data; ``formulation`` is 'true' or 'literal'."""
    g = np.asarray(prod.gamma, dtype=float)
    q, dq, ddq = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (q, dq, ddq))
    quad = np.einsum("ni,nj,ijk->nk", dq, dq, g)
    if formulation == "literal":
        return ddq + quad
    if formulation in ("true", "coordinate"):
        corr = dq[:, [0]] * dq  # delta_i1 delta_jk q_i' q_j' = x' q_k'
        return ddq + (quad - corr) / q[:, [0]]
    raise ValueError(f"unknown formulation {formulation!r}")


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    formulation: str
    status: str
    escape_time: float | None

    @property
    def completed(self) -> bool:
        return self.status == "ok"

    @property
    def x(self):
        return self.states[:, 0]

    @property
    def y(self):
        return self.states[:, 1]


def integrate(prod: BilinearProduct, a: float, b: float, T: float, formulation: str = "frame",
              start=(1.0, 0.0), t_eval=None, n: int = 201, rtol: float = 1e-10, atol: float = 1e-10,
              hmax: float | None = None, blowup: float = 1e8) -> Trajectory:
    """Integrate from ``start`` with frame velocity (a, b) up to time T (negative T runs backward).

    Blow-up (|state| > blowup or step underflow) is reported, not raised.
    """
    if formulation not in FORMULATIONS:
        raise ValueError(f"unknown formulation {formulation!r}")
    x0, y0 = start
    if formulation == "frame":
        s0 = np.array([x0, y0, a, b], dtype=float)
    else:
        s0 = np.array([x0, y0, x0 * a, x0 * b], dtype=float)
    if t_eval is None:
        t_eval = np.linspace(0.0, T, n)
    t_eval = np.asarray(t_eval, dtype=float)
    span = abs(t_eval[-1] - t_eval[0])
    hmax = hmax if hmax is not None else (span / 100 if span > 0 else 1.0)
    Y, n_ok, t_last, status = kernels.integrate_geodesic(
        FORMULATIONS[formulation], np.asarray(prod.gamma, dtype=float), s0, t_eval,
        rtol, atol, hmax, blowup)
    st = STATUS[status]
    return Trajectory(t_eval, Y, formulation, st, None if st == "ok" else float(t_last))


# --- closed forms -----------------------------------------------------------------

@dataclass(frozen=True)
class ClosedFormGeodesic:
    family: str
    alpha: float | None
    a: float
    b: float
    variant: str
    formulation: str
    domain: tuple
    fn: Callable = field(repr=False)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            x, y = self.fn(t)
        return np.broadcast_to(x, t.shape).astype(float), np.broadcast_to(y, t.shape).astype(float)

    def product(self) -> BilinearProduct:
        return family_product(self.family.upper(), self.alpha)


def _interval(coeffs, strict=True):
    """Maximal interval containing 0 on which the polynomial (highest degree first) is > 0 (or >= 0)."""
    p = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if p.size == 0:
        return (-math.inf, math.inf) if not strict else (0.0, 0.0)
    v0 = np.polyval(p, 0.0)
    roots = np.roots(p) if p.size > 1 else np.array([])
    real = np.sort(roots[np.abs(roots.imag) <= 1e-12 * max(1.0, np.max(np.abs(roots)) if roots.size else 1.0)].real)
    if v0 > 0:
        lo = max((r for r in real if r < 0), default=-math.inf)
        hi = min((r for r in real if r > 0), default=math.inf)
        return (lo, hi)
    if v0 == 0 and not strict:
        dp = np.polyval(np.polyder(p), 0.0) if p.size > 1 else 0.0
        if dp > 0:
            return (0.0, min((r for r in real if r > 1e-15), default=math.inf))
        if dp < 0:
            return (max((r for r in real if r < -1e-15), default=-math.inf), 0.0)
    return (0.0, 0.0)


def _intersect(*ivs):
    return (max(i[0] for i in ivs), min(i[1] for i in ivs))


def _log_shift(alpha):
    """Linear-in-tau constraint for x = 1 + ln(tau)/alpha > 0."""
    # alpha > 0: tau > e^{-alpha}; alpha < 0: tau < e^{-alpha}
    return math.exp(-alpha)


def closed_form(family: str, alpha=None, a: float = 0.0, b: float = 0.0,
                variant: str = "printed") -> ClosedFormGeodesic:
    """Closed-form geodesic through (1, 0) with initial velocity (a, b) and its maximal domain."""
    fam = family.lower()
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if fam in ("f1", "f2"):
        if alpha is None:
            raise ValueError(f"{fam} needs alpha")
        alpha = float(alpha)
        if fam == "f2" and alpha == 0:
            raise ValueError("F2(0) is not a member of the F2 family")
    elif fam in ("a1", "a2", "r1", "r2"):
        alpha = None
    else:
        raise ValueError(f"unsupported family {family!r}")
    a, b = float(a), float(b)
    if variant == "developed":
        fn, dom = _developed(fam, alpha, a, b)
        form = "true"
    else:
        fn, dom = _literal(fam, alpha, a, b, variant)
        form = "literal"
    return ClosedFormGeodesic(fam, alpha, a, b, variant, form, dom, fn)


def _const():
    return lambda t: (np.ones_like(t), np.zeros_like(t)), (-math.inf, math.inf)


def _line(b):
    return lambda t: (np.ones_like(t), b * t), (-math.inf, math.inf)


def _literal(fam, alpha, a, b, variant):
    E = math.e
    if fam in ("r1", "r2"):
        return _literal_r(fam, a, b, variant)
    if a == 0:
        return _line(b)
    if fam == "a1" or (fam == "f1" and alpha == 1):
        dom = _interval([a, 1 - 1 / E])
        if fam == "a1":
            return (lambda t: (1 + np.log(np.abs(a * t + 1)), b / a * np.log(np.abs(a * t + 1)))), dom

        def f(t):
            L = np.log(np.abs(a * t + 1))
            return 1 + L, L * (2 * b - a * L) / (2 * a)
        return f, dom
    if fam == "a2" or (fam == "f2" and alpha == -1):
        dom = _intersect(_interval([-a, 1]), _interval([a, E - 1]))
        if fam == "a2":
            return (lambda t: (1 - np.log(np.abs(1 - a * t)), -b / a * np.log(np.abs(1 - a * t)))), dom

        def f(t):
            L = np.log(np.abs(a * t - 1))
            return 1 - L, -L * (a * L + 2 * b) / (2 * a)
        return f, dom
    if fam == "f1" and alpha == 0:
        return (lambda t: (a * t + 1, b / a * (1 - np.exp(-a * t)))), _interval([a, 1])
    # generic power families: tau = a alpha t + 1
    c = _log_shift(alpha)
    dom = _interval([a * alpha, 1])
    dom = _intersect(dom, _interval([a * alpha, 1 - c]) if alpha > 0 else _interval([-a * alpha, c - 1]))
    if fam == "f1":
        K = (b * (alpha - 1) - alpha * a) / (a * (alpha - 1) ** 2)

        def f(t):
            tau = a * alpha * t + 1
            return (1 + np.log(np.abs(tau)) / alpha,
                    K * (tau ** ((alpha - 1) / alpha) - 1) + np.log(np.abs(tau)) / (alpha - 1))
        return f, dom
    if variant == "printed":
        K = (b * (alpha + 1) + alpha * a) / ((alpha + 1) ** 2 * a)

        def f(t):
            tau = alpha * a * t + 1
            return (1 + np.log(np.abs(tau)) / alpha,
                    K * (1 - tau ** (-(2 * alpha + 1) / alpha)) - np.log(np.abs(tau)) / (alpha + 1))
        return f, dom
    K = (b * (alpha + 1) - alpha * a) / ((alpha + 1) ** 2 * a)

    def f(t):
        tau = alpha * a * t + 1
        return (1 + np.log(tau) / alpha,
                K * (1 - tau ** (-(alpha + 1) / alpha)) + np.log(tau) / (alpha + 1))
    return f, dom


def _literal_r(fam, a, b, variant):
    if a == 0 and b == 0:
        return _const()
    E2 = math.exp(-2)
    s = 1.0 if fam == "r2" else -1.0
    # Q = s b^2 t^2 + 2 a t + 1 and x = ln(Q)/2 + 1 > 0
    dom = _interval([s * b * b, 2 * a, 1 - E2])
    flip = False
    if fam == "r1" and a * b > 0:
        if variant == "printed":
            raise ValueError("printed r1 form gives the wrong initial velocity when a*b > 0")
        flip = True
    if fam == "r2" and b < 0:
        if variant == "printed":
            raise ValueError("printed r2 form gives y'(0) = |b|; it needs b >= 0")
        flip = True
    bb = -b if flip else b
    sign = -1.0 if flip else 1.0
    if fam == "r1":
        # the printed form is only valid where b (b^2 t - a) >= 0
        dom = _intersect(dom, _interval([bb**3, -a * bb], strict=False))
        R = math.hypot(a, bb)

        def f(t):
            Q = -bb * bb * t * t + 2 * a * t + 1
            arg = np.sqrt(np.maximum(a * a + bb * bb - (bb * bb * t - a) ** 2, 0.0)) / R
            y = np.arccos(np.clip(arg, -1, 1)) - math.acos(abs(bb) / R)
            return 0.5 * np.log(np.abs(Q)) + 1, sign * y
        return f, dom
    ab = abs(bb)
    if a >= ab:
        def f(t):
            Q = bb * bb * t * t + 2 * a * t + 1
            y = np.log(np.abs(bb * bb * t + a + ab * np.sqrt(np.abs(Q)))) - math.log(abs(a + ab))
            return 0.5 * np.log(np.abs(Q)) + 1, sign * y
        return f, dom

    def f(t):
        Q = bb * bb * t * t + 2 * a * t + 1
        r = ab * np.sqrt(np.abs(Q))
        w = bb * bb * t + a
        y = 0.5 * np.log(np.abs((r + w) / (r - w))) - 0.5 * math.log(abs((ab + a) / (ab - a)))
        return 0.5 * np.log(np.abs(Q)) + 1, sign * y
    return f, dom


def _developed(fam, alpha, a, b):
    """Solve Q(gamma(t)) = t (a, b) for the paired representation."""
    if fam == "f1" and alpha == 0:
        return (lambda t: (np.exp(a * t), b * t)), (-math.inf, math.inf)
    if fam == "f1" and alpha == 1:
        def f(t):
            x = 1 + a * t
            return x, t * b - 1 - x * (np.log(x) - 1)
        return f, _interval([a, 1])
    if fam == "f2" and alpha == -1:
        def f(t):
            x = 1 / (1 - a * t)
            return x, x * (t * b + 1 - np.log(x)) - 1
        return f, _interval([-a, 1])
    if fam in ("f1", "f2"):
        dom = _interval([alpha * a, 1])

        def f(t):
            x = (1 + alpha * a * t) ** (1 / alpha)
            if fam == "f1":
                return x, t * b - 1 - (x**alpha - alpha * x) / (alpha - 1)
            return x, (t * b + (alpha * x ** (alpha + 1) + 1) / (alpha + 1)) / x**alpha - 1
        return f, dom
    if fam == "a1":
        return (lambda t: (1 + a * t, b * t)), _interval([a, 1])
    if fam == "a2":
        return (lambda t: (1 / (1 - a * t), b * t / (1 - a * t))), _interval([-a, 1])
    s = -1.0 if fam == "r1" else 1.0
    return (lambda t: (np.sqrt(1 + 2 * a * t + s * b * b * t * t), b * t)), _interval([s * b * b, 2 * a, 1])


def representation_for(family: str, alpha=None):
    return rho(family, alpha)


# --- verification ---------------------------------------------------------------

# initial velocities (a, b) per family: a = 0 branches everywhere, r1 with a*b <= 0,
# r2 with b >= 0 in both regimes (a >= |b| and a < |b|)
_GENERIC_VELOCITIES = ((1.0, 1.0), (-1.0, 2.0), (0.5, -1.0), (2.0, 0.3), (0.0, 1.5), (-0.7, -0.4))
GEODESIC_VELOCITIES = {
    "f1": _GENERIC_VELOCITIES, "f2": _GENERIC_VELOCITIES,
    "a1": tuple(v for v in _GENERIC_VELOCITIES if v != (2.0, 0.3)),
    "a2": tuple(v for v in _GENERIC_VELOCITIES if v != (2.0, 0.3)),
    "r1": ((0.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-0.5, 2.0), (2.0, 0.0), (0.0, -1.0)),
    "r2": ((2.0, 1.0), (1.0, 2.0), (0.0, 1.0), (3.0, 0.5), (-1.0, 2.0), (0.5, 0.5)),
}
GEODESIC_FAMILIES = tuple([("f1", a) for a in (-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0)]
                          + [("f2", a) for a in (-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0)]
                          + [(f, None) for f in ("a1", "a2", "r1", "r2")])

@dataclass(frozen=True)
class GeodesicVerdict:
    ok: bool
    formulation: str | None
    residuals: dict
    window: tuple

    def __bool__(self):
        return self.ok


def _window(dom, horizon):
    lo, hi = max(dom[0], -horizon), min(dom[1], horizon)
    L = hi - lo
    return (lo + 0.05 * L, hi - 0.05 * L), (lo, hi)


FD_STEP_FACTOR = 0.01


def _fd_derivatives(cf, t, dom):
    dist = np.minimum(t - dom[0], dom[1] - t)
    h = np.minimum(1e-3, FD_STEP_FACTOR * dist)
    pts = [cf(t + k * h) for k in (-2, -1, 0, 1, 2)]
    q = np.stack([np.column_stack(p) for p in pts])  # (5, n, 2)
    h2 = h[:, None]
    d1 = (-q[4] + 8 * q[3] - 8 * q[1] + q[0]) / (12 * h2)
    d2 = (-q[4] + 16 * q[3] - 30 * q[2] + 16 * q[1] - q[0]) / (12 * h2 * h2)
    return q[2], d1, d2


def fd_residual(cf: ClosedFormGeodesic, formulation: str, window, n: int = 101) -> float:
    """Max finite-difference residual of the closed form against a geodesic ODE on ``window``."""
    t = np.linspace(window[0], window[1], n)
    q, d1, d2 = _fd_derivatives(cf, t, cf.domain)
    res = np.abs(geodesic_residual(cf.product(), formulation, q, d1, d2))
    # relative to the size of the balancing terms; both blow up like dist^-2 near log singularities
    scale = 1.0 + np.abs(d2)
    return float(np.max(res / scale))


def numeric_distance(cf: ClosedFormGeodesic, formulation: str, window, n: int = 101) -> float:
    """Sup distance between closed form and numeric integration on ``window`` (integrated from 0)."""
    prod = cf.product()
    kind = "frame" if formulation in ("true", "frame") else "literal"
    worst = 0.0
    for end in (window[0], window[1]):
        if end == 0:
            continue
        lo_cmp, hi_cmp = window
        grid = np.linspace(0.0, end, n)
        traj = integrate(prod, cf.a, cf.b, end, formulation=kind, t_eval=grid)
        if not traj.completed:
            return math.inf
        mask = (grid >= lo_cmp - 1e-15) & (grid <= hi_cmp + 1e-15)
        x, y = cf(grid[mask])
        d = np.max(np.abs(np.column_stack([x, y]) - traj.states[mask, :2])) if mask.any() else 0.0
        worst = max(worst, float(d))
    return worst


def verify_closed_form(family: str, alpha=None, a: float = 0.0, b: float = 0.0, tol: float = 1e-6,
                       variant: str = "printed", formulation: str | None = None,
                       horizon: float = 3.0, n: int = 101) -> GeodesicVerdict:
    """Check a closed form against the geodesic ODE (finite differences) and against integration.

    Both the true and literal formulations are tried unless ``formulation`` is given; the
    verdict records which one the closed form satisfies.
    """
    cf = closed_form(family, alpha, a, b, variant)
    inner, _ = _window(cf.domain, horizon)
    if not inner[1] > inner[0]:
        return GeodesicVerdict(False, None, {"error": "empty domain"}, inner)
    forms = [formulation] if formulation else ["true", "literal"]
    residuals = {}
    chosen = None
    x0, y0 = cf(np.array([0.0]))
    init = max(abs(float(x0[0]) - 1.0), abs(float(y0[0])))
    residuals["initial_point"] = init
    for form in forms:
        fd = fd_residual(cf, form, inner, n)
        nd = numeric_distance(cf, form, inner, n)
        residuals[form] = {"fd_residual": fd, "numeric_distance": nd}
        if chosen is None and fd <= tol and nd <= tol and init <= tol:
            chosen = form
    return GeodesicVerdict(chosen is not None, chosen, residuals, inner)


def development_residual(family: str, alpha=None, a: float = 0.0, b: float = 0.0, source: str = "numeric",
                         horizon: float = 2.0, n: int = 201) -> float:
    """Max |second difference| of Q(gamma(t)) on a uniform grid inside the geodesic's domain.

    ``source``: 'numeric' (frame integration), or a closed-form variant name.
    """
    rep = rho(family, alpha)
    Q = developing_map(rep)
    if source == "numeric":
        dom = closed_form(family, alpha, a, b, "developed").domain
    else:
        dom = closed_form(family, alpha, a, b, source).domain
    inner, _ = _window(dom, horizon)
    t = np.linspace(inner[0], inner[1], n)
    if source == "numeric":
        prod = family_product(family.upper(), alpha)
        pts = np.full((n, 2), np.nan)
        i0 = int(np.searchsorted(t, 0.0))
        fwd = np.concatenate([[0.0], t[i0:]]) if t[i0:].size else None
        bwd = np.concatenate([[0.0], t[:i0][::-1]]) if i0 > 0 else None
        if fwd is not None and fwd.size > 1:
            tr = integrate(prod, a, b, fwd[-1], t_eval=fwd)
            pts[i0:] = tr.states[1:, :2]
        if bwd is not None:
            tr = integrate(prod, a, b, bwd[-1], t_eval=bwd)
            pts[:i0] = tr.states[1:, :2][::-1]
    else:
        cf = closed_form(family, alpha, a, b, source)
        x, y = cf(t)
        pts = np.column_stack([x, y])
    with np.errstate(all="ignore"):
        vals = np.array([Q(px, py) if px > 0 else (np.nan, np.nan) for px, py in pts])
    d2 = vals[2:] - 2 * vals[1:-1] + vals[:-2]
    r = float(np.max(np.abs(d2)))
    return r if np.isfinite(r) else math.inf


def left_translate_trajectory(traj: Trajectory, g0) -> np.ndarray:
    """Positions of L_{g0} applied to a trajectory: (x, y) -> (x0 x, x0 y + y0)."""
    x0, y0 = g0
    return np.column_stack([x0 * traj.x, x0 * traj.y + y0])


# --- completeness ------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    verdict: str
    escapes: list
    trace_complete: bool
    agrees: bool

    def to_dict(self):
        return {"verdict": self.verdict, "escapes": self.escapes, "trace_complete": self.trace_complete,
                "agrees": self.agrees}


DEFAULT_GRID = tuple(np.linspace(-0.3, 0.3, 5).tolist())


def completeness_probe(prod: BilinearProduct, grid=DEFAULT_GRID, horizon: float = 50.0) -> ProbeResult:
    """Integrate the frame ODE over a grid of initial velocities; report escapes."""
    escapes = []
    for a in grid:
        for b in grid:
            traj = integrate(prod, a, b, horizon, t_eval=np.array([0.0, horizon]))
            if not traj.completed:
                escapes.append({"a": a, "b": b, "escape_time": traj.escape_time, "status": traj.status})
    verdict = "complete-consistent" if not escapes else "incomplete"
    tc = is_complete(prod, 1e-12)
    return ProbeResult(verdict, escapes, tc, tc == (not escapes))
