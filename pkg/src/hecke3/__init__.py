"""Exact rewriting and freeness certification for the cubic, quartic and quintic
Hecke algebras of B3, plus the low-dimensional irreducible representations."""

__version__ = "0.1.0"
