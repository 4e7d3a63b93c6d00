"""Certified-arithmetic laboratory for simultaneous Diophantine approximation."""

from .scalar import (
    DEFAULT_PRECISION,
    INFINITE,
    CertifiedScalar,
    ComparisonResult,
    certified_compare,
    is_infinite,
)
from .thetaspec import CORPUS, ThetaSpec, corpus_spec, evaluate

__all__ = [
    "DEFAULT_PRECISION",
    "INFINITE",
    "CertifiedScalar",
    "ComparisonResult",
    "certified_compare",
    "is_infinite",
    "ThetaSpec",
    "CORPUS",
    "corpus_spec",
    "evaluate",
]

__version__ = "0.1.0"
