"""Exact and sublinear estimation of complementary cumulative degree histograms."""

from .ccdh import BmaVerdict, Ccdh, bma_check, exact_ccdh, h_index, z_index
from .errors import CcdhError
from .estimator import CcdhEstimate, EstimatorParams, SampleSizes, sample_sizes
from .graph import Graph, degree_array, read_edge_list
from .query import GraphOracle, adaptive_query_estimate, nonadaptive_query_estimate
from .stream import EdgeStream, onepass_run, twopass_run

__all__ = [
    "BmaVerdict", "Ccdh", "CcdhError", "CcdhEstimate", "EdgeStream", "EstimatorParams",
    "Graph", "GraphOracle", "SampleSizes", "adaptive_query_estimate", "bma_check",
    "degree_array", "exact_ccdh", "h_index", "nonadaptive_query_estimate", "onepass_run",
    "read_edge_list", "sample_sizes", "twopass_run", "z_index",
]
__version__ = "0.1.0"
