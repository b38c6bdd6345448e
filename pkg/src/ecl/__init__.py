"""Verification toolkit for elliptic Casimir connections."""

__version__ = "0.1.0"
