"""Bounds on probabilities of causation from two single-treatment trials.

Two trials study treatments ``X`` and ``Y`` with a shared binary outcome
``Z``.  Merging them into one response-function model over ``{X, Y} -> Z``
restricts the X-model's free parameter and hence its PNS bounds.
"""

from .bounds import (
    CompatibilityReport,
    DegeneracyProfile,
    TightenedBounds,
    check_compatibility,
    closed_form_lambda_min,
    degenerate_compatibility,
    degeneracy_profile,
    restricted_lambda_range,
    solve_lp,
    tightened_pns_bounds,
)
from .errors import (
    ConditioningEventNull,
    DimensionTooHigh,
    Incompatible,
    Infeasible,
    NoConvergence,
    NotDegenerate,
    PnsMergeError,
    ValidationError,
)
from .info import (
    FalsificationVerdict,
    InfoReport,
    falsify_by_conditional_info,
    falsify_by_marginal_info,
    info_bounds,
    info_report,
    nz_z_information,
)
from .maxent import EvidenceRanking, MaxEntResult, maxent_lambda_single, maxent_scm, rank_evidence
from .polytope import PolytopeSpec, build_polytope, build_x_only_polytope, is_member, joint_distribution
from .scm import LambdaInterval, PnsBounds, lambda_range, pns_bounds_single, pns_from_lambda
from .trial_data import BinaryMarginal, CountTable, TrivariateTable, parse_marginal, parse_trial_summary

__version__ = "0.1.0"
