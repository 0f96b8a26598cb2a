"""Quantified constraint satisfaction with restricted adversaries."""
__version__ = "0.1.0"
