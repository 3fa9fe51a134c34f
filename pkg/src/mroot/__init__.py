"""Multiplicity structure, deflation and certification of singular roots."""

__version__ = "0.1.0"
