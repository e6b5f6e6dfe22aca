"""Collapse-geometry and Monte Carlo toolkit for the two-detector atom-interferometer probe test."""

__version__ = "0.1.0"
