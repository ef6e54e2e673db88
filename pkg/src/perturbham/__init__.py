"""Rainbow Hamilton cycles in randomly perturbed, randomly coloured graphs.

A dense seed graph with linear minimum degree, perturbed by two sparse
binomial rounds and coloured uniformly with slightly more than n colours,
is driven through a three-stage constructive pipeline: a rainbow
depth-first search finds an almost-spanning rainbow path in the first
round, seed-edge absorbers extend it to n - 2 vertices, and one
second-round edge closes the rainbow Hamilton cycle. A Monte Carlo
harness measures how often each stage succeeds at desk scale.
"""

from .absorber import PipelineResult, run_pipeline
from .errors import ConfigError, ContractError, PerturbError
from .generators import PerturbationConfig, make_seed, sample_gnp, trial_rng, two_round_split
from .graph_core import ColouredGraph, Graph, GraphBuilder, VertexCycle, VertexPath, is_rainbow, union
from .oracle import OracleBudget, brute_longest_rainbow_path, brute_rainbow_hamilton
from .rdfs import check_trace, longest_rainbow_path, rdfs_run

__all__ = [
    "ColouredGraph",
    "ConfigError",
    "ContractError",
    "Graph",
    "GraphBuilder",
    "OracleBudget",
    "PerturbError",
    "PerturbationConfig",
    "PipelineResult",
    "VertexCycle",
    "VertexPath",
    "brute_longest_rainbow_path",
    "brute_rainbow_hamilton",
    "check_trace",
    "is_rainbow",
    "longest_rainbow_path",
    "make_seed",
    "rdfs_run",
    "run_pipeline",
    "sample_gnp",
    "trial_rng",
    "two_round_split",
    "union",
]

__version__ = "0.1.0"
