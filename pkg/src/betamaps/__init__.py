"""Exact beta-ensemble cumulants and the map bijections behind them."""

from .perms import Label, Perm
from .poly import BivariatePoly

__all__ = ["Label", "Perm", "BivariatePoly"]
__version__ = "0.1.0"
