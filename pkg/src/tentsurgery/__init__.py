"""Denjoy-type surgery on tent maps with a finite critical orbit.

Exact algebraic slopes, first-hit preimage counting, certified inserted
lengths, Markov data, the surgered map and its verification suites.
"""

from .algebraic import AlgebraicParameter, AlgebraicPoint, catalog
from .branches import BranchKind, CubicBranch
from .errors import (CapExceeded, DomainError, InsufficientDepth, InvalidParameter, LengthMismatch,
                     NonConvergence, NotMarkov, NotRenormalizable, PrecisionExhausted, SchemaError,
                     TailBoundUnavailable, TentSurgeryError)
from .markov import analyze, build_partition, growth_constant, lap_counts, spectral_radius
from .mass import left_mass, left_mass_truncated, mass_model, total_length
from .preimage import CountTable, LengthSchedule, count_below, enumerate_tree, level_counts
from .surgery import SurgeredMapDescriptor, layout, lipschitz_bound
from .tent import (CriticalOrbitData, NotFinite, core_interval, critical_orbit, itinerary,
                   parity_lex_compare, renorm_depth, restrictive_interval, tent_apply)
from .verify import (BasinReport, CheckResult, attractor_location, check_lengths, check_quotients,
                     entropy_check, find_cycle, hyperbolicity, run_suite, simulate_basin)

__version__ = "0.1.0"

__all__ = [
    "AlgebraicParameter", "AlgebraicPoint", "catalog",
    "BranchKind", "CubicBranch",
    "CapExceeded", "DomainError", "InsufficientDepth", "InvalidParameter", "LengthMismatch",
    "NonConvergence", "NotMarkov", "NotRenormalizable", "PrecisionExhausted", "SchemaError",
    "TailBoundUnavailable", "TentSurgeryError",
    "analyze", "build_partition", "growth_constant", "lap_counts", "spectral_radius",
    "left_mass", "left_mass_truncated", "mass_model", "total_length",
    "CountTable", "LengthSchedule", "count_below", "enumerate_tree", "level_counts",
    "SurgeredMapDescriptor", "layout", "lipschitz_bound",
    "CriticalOrbitData", "NotFinite", "core_interval", "critical_orbit", "itinerary",
    "parity_lex_compare", "renorm_depth", "restrictive_interval", "tent_apply",
    "BasinReport", "CheckResult", "attractor_location", "check_lengths", "check_quotients",
    "entropy_check", "find_cycle", "hyperbolicity", "run_suite", "simulate_basin",
]
