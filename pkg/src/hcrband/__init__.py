"""Certified envelope bands and bracketed shooting for u'' = b^2 (u^4 - t^4)."""

__version__ = "0.1.0"
