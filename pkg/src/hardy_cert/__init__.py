"""Tilted Hardy paradoxes: classical and quantum bounds, self-testing strategies and certified randomness."""

__version__ = "0.1.0"
