"""Numerical toolkit for time-reversal quantum metrology protocols."""

__version__ = "0.1.0"
