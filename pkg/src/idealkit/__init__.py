"""Finite universal-algebra workbench for ideals, congruences and filters."""

__version__ = "0.1.0"
