"""Exact counting harness for curves on toric varieties over finite fields."""

__version__ = "0.1.0"
