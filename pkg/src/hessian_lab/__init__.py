"""Numerical laboratory for polytopes of mean-zero fields with bounded discrete hessian on the triangular torus."""

__version__ = "0.1.0"
