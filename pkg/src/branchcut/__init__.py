"""Cauchy-type integrals of algebraic functions over self-intersecting curves."""
from .config import DEFAULT, Tolerances  # noqa: F401

__version__ = "0.1.0"
