"""Gromov–Hausdorff type distances on finite p-metric and ultrametric spaces."""

from ._config import EPS, BudgetExceeded, InvalidCorrespondence, PGHError, StructureError, TriangleViolation
from .dendrograms import Dendrogram, canonical_signature, closed_quotient, from_dendrogram, to_dendrogram
from .generators import GenConfig, SplitMix64, generate
from .gh import (
    Correspondence,
    DistanceReport,
    dghp_bounds,
    dghp_exact,
    dghp_via_maps,
    hausdorff_ultra,
    ugh_hat,
    ugh_structural,
)
from .interleaving import check_eps_interleaved, interleaving_distance
from .parith import INF, a_p, lambda_p, p_sum, p_sum_many, parse_p
from .projections import project, snowflake
from .spaces import FiniteMetricSpace, equilateral, load, validate

__version__ = "0.1.0"

__all__ = [
    "EPS", "INF", "BudgetExceeded", "Correspondence", "Dendrogram", "DistanceReport",
    "FiniteMetricSpace", "GenConfig", "InvalidCorrespondence", "PGHError", "SplitMix64",
    "StructureError", "TriangleViolation", "a_p", "canonical_signature", "check_eps_interleaved",
    "closed_quotient", "dghp_bounds", "dghp_exact", "dghp_via_maps", "equilateral",
    "from_dendrogram", "generate", "hausdorff_ultra", "interleaving_distance", "lambda_p",
    "load", "p_sum", "p_sum_many", "parse_p", "project", "snowflake", "to_dendrogram",
    "ugh_hat", "ugh_structural", "validate",
]
