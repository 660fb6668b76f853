"""Certified polygon decomposition into semiconvex, rotund and John pieces."""

__version__ = "0.1.0"
