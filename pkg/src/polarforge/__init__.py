"""Finite polar spaces, m-ovoids and the constructions that glue them."""

__version__ = "0.1.0"
