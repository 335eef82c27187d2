"""Finite-dimensional workbench for quotient-space duality, functional calculus
and invariant subspaces of matrices."""

__version__ = "0.1.0"
