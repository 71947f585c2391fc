"""Conversion-matrix method of moments for time-modulated scatterers."""

__version__ = "0.1.0"
