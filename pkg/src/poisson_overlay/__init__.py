"""Triangles formed by Poisson points among Poisson lines: simulation and theory."""

__version__ = "0.1.0"
