"""Riemannian subdivision schemes on the unit sphere and their convergence certificates."""

__version__ = "0.1.0"
