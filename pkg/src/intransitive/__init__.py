"""Intransitive geometries, amalgams and finite orthogonal groups."""

__version__ = "0.1.0"
