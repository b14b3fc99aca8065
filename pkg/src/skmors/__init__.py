"""Multiobjective ranking and selection with stochastic kriging metamodels.

Submodules: ``core`` (dominance, sample statistics), ``kriging``,
``hypervolume``, ``criteria``, ``screening``, ``allocators``, ``problems``,
``metrics`` and ``harness``.
"""

from ._kernels import BACKEND
from .allocators import VARIANTS, Allocator, make_allocator
from .core import DomRelation, ParetoState, SampleStore, dominates, pareto_front, pareto_mask
from .errors import (
    ConfigurationError,
    GenerationError,
    InsufficientReplicationsError,
    InvalidInputError,
    InvalidReferenceError,
    InvalidStateError,
    ModelFitError,
    SKMorsError,
)
from .harness import ExperimentConfig, IterationRecord, aggregate, compare, run_experiment
from .metrics import ErrorCounts, classify_errors, f1
from .problems import CandidateSet, NoiseSpec, generate_candidates, get_problem

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "VARIANTS",
    "Allocator",
    "CandidateSet",
    "ConfigurationError",
    "DomRelation",
    "ErrorCounts",
    "ExperimentConfig",
    "GenerationError",
    "InsufficientReplicationsError",
    "InvalidInputError",
    "InvalidReferenceError",
    "InvalidStateError",
    "IterationRecord",
    "ModelFitError",
    "NoiseSpec",
    "ParetoState",
    "SKMorsError",
    "SampleStore",
    "aggregate",
    "classify_errors",
    "compare",
    "dominates",
    "f1",
    "generate_candidates",
    "get_problem",
    "make_allocator",
    "pareto_front",
    "pareto_mask",
    "run_experiment",
]
