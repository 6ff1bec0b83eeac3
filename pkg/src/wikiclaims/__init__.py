"""Multilingual synthetic fact-checking dataset generation from Wikipedia dumps."""

__version__ = "0.1.0"
