"""Positional encoding with shifted basis functions."""

__version__ = "0.1.0"
