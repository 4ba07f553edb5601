"""Numerics for restriction bounds of Casimir eigenfunctions to geodesic-circle hypersurfaces."""
from ._kernels import BACKEND

__all__ = ["BACKEND"]
__version__ = "0.1.0"
