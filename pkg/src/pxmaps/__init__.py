"""Rotary maps on Praeger-Xu graphs: exact enumeration, construction and census."""

__version__ = "0.1.0"
