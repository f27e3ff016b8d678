"""Spreadness, spread approximation and t-intersecting families in simplicial complexes."""

__version__ = "0.1.0"
