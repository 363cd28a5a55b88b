"""Column-generation CVRP solver with QUBO-based pricing and separation heuristics.

The package solves the set-cover relaxation of the capacitated vehicle
routing problem by column generation, optionally strengthened with rounded
capacity cuts.  The NP-hard pricing and separation subproblems can be solved
exactly (subset DP / branch-and-cut) or heuristically through QUBO models
sampled by a seeded simulated-annealing sampler.  The sampler sits behind a
small pluggable interface so that other binary-quadratic samplers can be
substituted.
"""

from .instance import Instance, Route, parse_instance, route_cost
from .master import MasterState, RccCut, init_singletons, solve_master
from .qubo import Qubo, VarLayout, build_pricing_qubo, build_separation_qubo
from .sampler import SampleSet, SamplerConfig, brute_force_min, sample
from .pricing import PricingResult, price_bc, price_dp
from .driver import ColgenConfig, ColgenReport, SeparationReport, run_colgen, run_cut_loop

__version__ = "0.1.0"

__all__ = [
    "Instance",
    "Route",
    "parse_instance",
    "route_cost",
    "MasterState",
    "RccCut",
    "init_singletons",
    "solve_master",
    "Qubo",
    "VarLayout",
    "build_pricing_qubo",
    "build_separation_qubo",
    "SampleSet",
    "SamplerConfig",
    "sample",
    "brute_force_min",
    "PricingResult",
    "price_dp",
    "price_bc",
    "ColgenConfig",
    "ColgenReport",
    "SeparationReport",
    "run_colgen",
    "run_cut_loop",
    "__version__",
]
