"""Hilbert-space fragmentation toolkit for semigroup-constrained chains."""

__version__ = "0.1.0"
