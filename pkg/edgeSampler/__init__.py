from .analyzer import Analysis, CertificateReport, WalkDistribution, analyze, certify, walk_distribution
from .generators import GeneratedGraph, GenSpec, generate
from .graph import Graph, GraphFormatError, OracleSession, QueryCounts, VertexError, load_graph, read_graph
from .harness import BenchRow, SampleReport, bench, estimate_edge_count, verify
from .layering import LayeredPartition, LayeringNotCovered, compute_layering, default_params
from .sampler import SamplerParams, SamplingExhausted, sample_edge, sample_edge_once

__all__ = [
    "Analysis",
    "BenchRow",
    "CertificateReport",
    "GenSpec",
    "GeneratedGraph",
    "Graph",
    "GraphFormatError",
    "LayeredPartition",
    "LayeringNotCovered",
    "OracleSession",
    "QueryCounts",
    "SampleReport",
    "SamplerParams",
    "SamplingExhausted",
    "VertexError",
    "WalkDistribution",
    "analyze",
    "bench",
    "certify",
    "compute_layering",
    "default_params",
    "estimate_edge_count",
    "generate",
    "load_graph",
    "read_graph",
    "sample_edge",
    "sample_edge_once",
    "verify",
    "walk_distribution",
]
