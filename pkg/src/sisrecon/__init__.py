"""Sampled-time SIS epidemics, exact ML network reconstruction, and the
max-cut reduction showing that reconstruction is NP-hard."""

from .errors import SISReconError
from .graphs import AdjacencyMatrix, LinkSet, connected_graphs, is_connected
from .maxcut import UQPInstance, cut_size, maxcut_bruteforce, optimality_gap, uqp_bruteforce, uqp_from_graph
from .ml import MLResult, ml_full_bruteforce, ml_reduced_bruteforce, solve_maxcut_via_reduction
from .reduction import (
    LAMBDA_PLUS,
    MU,
    ReductionPlan,
    build_full_trace,
    build_reduced_trace,
    check_inequalities,
    extract_quadratic_form,
    plan_full_reduction,
    plan_reduction,
)
from .sis import SISParams, ViralTrace, log_likelihood, simulate, validate_params

__version__ = "0.1.0"

__all__ = [
    "AdjacencyMatrix",
    "LAMBDA_PLUS",
    "LinkSet",
    "MLResult",
    "MU",
    "ReductionPlan",
    "SISParams",
    "SISReconError",
    "UQPInstance",
    "ViralTrace",
    "build_full_trace",
    "build_reduced_trace",
    "check_inequalities",
    "connected_graphs",
    "cut_size",
    "extract_quadratic_form",
    "is_connected",
    "log_likelihood",
    "maxcut_bruteforce",
    "ml_full_bruteforce",
    "ml_reduced_bruteforce",
    "optimality_gap",
    "plan_full_reduction",
    "plan_reduction",
    "simulate",
    "solve_maxcut_via_reduction",
    "uqp_bruteforce",
    "uqp_from_graph",
    "validate_params",
]
