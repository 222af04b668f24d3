"""Flat left-invariant affine structures on Aff(R): verification and classification."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
