"""Exact computations with Heisenberg and Virasoro vertex operator algebras:
A_n algebras and bimodules, regular representations on dual spaces, and
induced modules."""

__version__ = "0.1.0"

from .linalg import Q, fmt
from .voa import VOA, ModuleRealization, StateVector, construct_voa

__all__ = ["Q", "fmt", "VOA", "ModuleRealization", "StateVector", "construct_voa", "__version__"]
