"""Pure-Python kernels. Same signatures and semantics as ``_ckernels``."""

import math

import numpy as np

FRAME, COORDINATE, LITERAL = 0, 1, 2
OK, BLOWUP, UNDERFLOW, MAXSTEPS = 0, 1, 2, 3

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _rhs(kind, g, s):
    x, y, p, q = s
    if kind == FRAME:
        # x' = x v1, y' = x v2, v_k' = -Gamma^k_ij v_i v_j
        return (
            x * p,
            x * q,
            -(g[0][0][0] * p * p + (g[0][1][0] + g[1][0][0]) * p * q + g[1][1][0] * q * q),
            -(g[0][0][1] * p * p + (g[0][1][1] + g[1][0][1]) * p * q + g[1][1][1] * q * q),
        )
    if kind == COORDINATE:
        # C^k_ij = (Gamma^k_ij - delta_i1 delta_jk) / x
        a0 = g[0][0][0] * p * p + (g[0][1][0] + g[1][0][0]) * p * q + g[1][1][0] * q * q - p * p
        a1 = g[0][0][1] * p * p + (g[0][1][1] + g[1][0][1]) * p * q + g[1][1][1] * q * q - p * q
        return (p, q, -a0 / x, -a1 / x)
    return (
        p,
        q,
        -(g[0][0][0] * p * p + (g[0][1][0] + g[1][0][0]) * p * q + g[1][1][0] * q * q),
        -(g[0][0][1] * p * p + (g[0][1][1] + g[1][0][1]) * p * q + g[1][1][1] * q * q),
    )


def integrate_geodesic(kind, gamma, y0, t_eval, rtol, atol, hmax, blowup, max_steps=1000000):
    """Adaptive DOPRI5 on the 4-dim geodesic system, landing exactly on ``t_eval``.

    ``t_eval`` starts at the initial time and is monotone in either direction.
    Returns ``(Y, n_ok, t_last, status)``; rows past ``n_ok`` are NaN.
    """
    g = np.asarray(gamma, dtype=float).tolist()
    t_eval = np.asarray(t_eval, dtype=float)
    m = t_eval.shape[0]
    out = np.full((m, 4), np.nan)
    s = [float(v) for v in y0]
    out[0] = s
    if m == 1:
        return out, 1, float(t_eval[0]), OK
    t = float(t_eval[0])
    direction = 1.0 if t_eval[-1] >= t else -1.0
    h = min(hmax, 1e-3 * max(1.0, abs(t_eval[-1] - t)))
    k1 = _rhs(kind, g, s)
    steps = 0
    idx = 1
    while idx < m:
        target = float(t_eval[idx])
        if steps >= max_steps:
            return out, idx, t, MAXSTEPS
        remaining = (target - t) * direction
        last = h >= remaining
        step = remaining if last else h
        hs = step * direction
        ks = [k1]
        for i in range(1, 7):
            row = _A[i]
            st = [s[c] + hs * sum(row[j] * ks[j][c] for j in range(i)) for c in range(4)]
            if i == 6:
                snew = st
            ks.append(_rhs(kind, g, st))
        err = 0.0
        for c in range(4):
            e = hs * sum(_E[j] * ks[j][c] for j in range(7))
            sc = atol + rtol * max(abs(s[c]), abs(snew[c]))
            err += (e / sc) ** 2
        err = math.sqrt(err / 4)
        steps += 1
        if not math.isfinite(err):
            err = 1e10
        if err <= 1.0:
            t = target if last else t + hs
            s = snew
            k1 = ks[6]
            if max(abs(v) for v in s) > blowup:
                return out, idx, t, BLOWUP
            if last:
                out[idx] = s
                idx += 1
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            if not last:
                h = min(hmax, h * fac)
        else:
            h = step * max(0.2, 0.9 * err ** -0.2)
        if h < 1e-14 * max(1.0, abs(t)):
            return out, idx, t, UNDERFLOW
    return out, m, t, OK


def lsa_residuals(gamma, c):
    """Max |assoc(x,y,z) - assoc(y,x,z)| and max |x.y - y.x - [x,y]| over basis."""
    g = np.asarray(gamma)
    c = np.asarray(c)
    # (e_i e_j) e_k and e_i (e_j e_k)
    left = np.einsum("ijm,mkl->ijkl", g, g)
    right = np.einsum("jkm,iml->ijkl", g, g)
    assoc = left - right
    sym = assoc - assoc.transpose(1, 0, 2, 3)
    tors = g - g.transpose(1, 0, 2) - c
    return _maxabs(sym), _maxabs(tors)


def assoc_residual(gamma):
    g = np.asarray(gamma)
    left = np.einsum("ijm,mkl->ijkl", g, g)
    right = np.einsum("jkm,iml->ijkl", g, g)
    return _maxabs(left - right)


def _maxabs(a):
    if a.size == 0:
        return 0 * a.sum()
    return max(abs(v) for v in a.ravel()) if a.dtype == object else float(np.max(np.abs(a)))
