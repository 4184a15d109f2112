"""Generalized entropy of dynamical systems: growth orders, entourage counts, orbit coding."""

__version__ = "1.0.0"
