"""Exact polynomial constructions, Groebner checks and torsion-order certificates."""

__version__ = "0.1.0"
