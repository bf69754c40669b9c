"""Moyal-deformed first heavenly equation: exact symbolic checks and Atiyah-Hitchin numerics."""

__version__ = "0.1.0"
