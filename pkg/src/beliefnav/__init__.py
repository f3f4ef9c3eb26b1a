"""Uncertainty-driven exploration and point-goal navigation on 2D grids."""

__version__ = "0.1.0"
