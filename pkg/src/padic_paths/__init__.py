"""Exact p-adic and real propagators for quadratic Lagrangians."""

__version__ = "0.1.0"
