"""Numerical toolkit for symmetric inner functions and localization radii."""
__version__ = "0.1.0"
