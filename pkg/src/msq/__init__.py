"""Measurement simplification for parametrized quantum circuits."""

__version__ = "0.1.0"
