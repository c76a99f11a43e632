"""Symmetric MOD_m circuits: AND_n constructions, supports and period analysis."""

__version__ = "0.1.0"
