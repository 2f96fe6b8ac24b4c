"""Exact-arithmetic homological algebra for finite-dimensional DG algebras.

Computes Hochschild, cyclic and periodic cyclic homology over Q and F_p,
Tate (co)homology of cyclic group actions on complexes, edgewise subdivision
of cyclic modules, and Hodge-to-de-Rham style degeneration verdicts, all at
desk scale with exact sparse linear algebra.
"""

from dgcyclic.linalg import Field, SparseMatrix, QQ

__all__ = ["Field", "SparseMatrix", "QQ"]
__version__ = "0.1.0"
