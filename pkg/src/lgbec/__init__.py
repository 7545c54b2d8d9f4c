"""Bose-Einstein condensation in dark power-law Laguerre-Gaussian traps."""

__version__ = "0.1.0"
