"""Quasi-Polish spaces as finite syntactic data, with brute-force oracles."""

from .errors import QpolisError

__version__ = "0.1.0"
