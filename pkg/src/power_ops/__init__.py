"""Exact power-operation computations for a height-2 elliptic curve at p = 3."""

__version__ = "0.1.0"
