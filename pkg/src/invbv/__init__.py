"""Quantified bit-vector solving by instantiation with invertibility conditions."""
__version__ = "0.1.0"
