"""Kernel selection: compiled extension when importable, else pure Python.

Set ``AFFINELIE_BACKEND=python`` to force the fallback.
"""

import os

import numpy as np

from . import _pykernels
from ._pykernels import BLOWUP, COORDINATE, FRAME, LITERAL, MAXSTEPS, OK, UNDERFLOW

_ck = None
if os.environ.get("AFFINELIE_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _ck
    except ImportError:  # pragma: no cover - depends on build
        _ck = None

BACKEND = "cython" if _ck is not None else "python"

__all__ = [
    "BACKEND", "FRAME", "COORDINATE", "LITERAL", "OK", "BLOWUP", "UNDERFLOW", "MAXSTEPS",
    "integrate_geodesic", "lsa_residuals", "assoc_residual", "backend_module",
]


def backend_module(name=None):
    """Return the kernel module for ``name`` ('cython' or 'python'); default is the active one."""
    name = name or BACKEND
    if name == "python":
        return _pykernels
    if _ck is None:
        raise ImportError("compiled kernels are not built")
    return _ck


def integrate_geodesic(kind, gamma, y0, t_eval, rtol=1e-10, atol=1e-10, hmax=np.inf,
                       blowup=1e8, max_steps=1000000):
    mod = _ck if _ck is not None else _pykernels
    return mod.integrate_geodesic(int(kind), gamma, y0, t_eval, float(rtol), float(atol),
                                  float(hmax), float(blowup), int(max_steps))


def _is_exact(*arrays):
    return any(np.asarray(a).dtype == object for a in arrays)


def lsa_residuals(gamma, c):
    if _ck is None or _is_exact(gamma, c):
        return _pykernels.lsa_residuals(gamma, c)
    return _ck.lsa_residuals(gamma, c)


def assoc_residual(gamma):
    if _ck is None or _is_exact(gamma):
        return _pykernels.assoc_residual(gamma)
    return _ck.assoc_residual(gamma)
