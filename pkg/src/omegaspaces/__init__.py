"""Finite-resolution constructions for Cantor and Sierpinski boundary approximations."""

__version__ = "0.1.0"
