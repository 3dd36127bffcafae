"""Exact Kloosterman sums, their bilinear forms over intervals, and an
empirical laboratory for the identities and inequalities they satisfy."""

from .bilinear import WeightSequence, completion_majorant, sum_S, sum_S_completed, sum_SI, sum_SIJ
from .expsums import kloosterman, tol
from .interval import Interval
from .modarith import DomainError, PrimeContext, get_context
from .spectral import KloostermanTable, build_table, get_table

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "Interval",
    "KloostermanTable",
    "PrimeContext",
    "WeightSequence",
    "build_table",
    "completion_majorant",
    "get_context",
    "get_table",
    "kloosterman",
    "sum_S",
    "sum_SI",
    "sum_SIJ",
    "sum_S_completed",
    "tol",
]
