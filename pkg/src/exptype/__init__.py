"""Exact certification of exponential type for formal connections with quadratic poles."""

__version__ = "0.1.0"
