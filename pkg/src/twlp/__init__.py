"""Exact and approximate LP formulations for sparse binary, polynomial and
network polynomial optimization, built over tree decompositions."""

from .gb import GBProblem, ListOracle, PolyOracle, CallableOracle, build_lp, build_feasible_tables
from .graphs import Graph, TreeDecomposition, heuristic_decomposition, validate
from .npo import NPOConstraint, NPOProblem, good_split, npo_to_po
from .pipeline import RunConfig, solve_gb, solve_npo, solve_po
from .poly import Constraint, POProblem, Polynomial, scaled_violation

__version__ = "0.1.0"
