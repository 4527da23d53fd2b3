"""Differentially private synthesis of streaming graphs under w-event edge privacy."""

from .community import CommunityPartition, comm_div, determine, louvain, modularity
from .dp import NoiseSource, WindowAccountant, ZeroNoise, laplace_perturb, normsub
from .graph import GraphStream, Snapshot, degrees, parse_temporal_edges, serialize_stream
from .metrics import METRICS, MetricsReport, evaluate
from .pipeline import RunConfig, plan_budget, run_experiment, synthesize_stream

__version__ = "0.1.0"
