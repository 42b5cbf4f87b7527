"""Response-function SCM for a single binary treatment W -> Z.

The noise ``N_Z`` ranges over the four functions {0, 1, ID, NOT} (indices
0..3).  Fitting ``P(W, Z)`` leaves one free parameter ``lam``, the weight on
the constant-0 function:

    a(lam) = [lam, 1 - p00 - p01 + lam, p00 - lam, p01 - lam]

with ``p00 = P(Z=0|W=0)`` and ``p01 = P(Z=0|W=1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningEventNull, LambdaOutOfRange
from .trial_data import BinaryMarginal, TOL, as_marginal

ZERO, ONE, ID, NOT = 0, 1, 2, 3
FUNCTION_NAMES = ("0", "1", "ID", "NOT")

# FUNCTION_TABLE[j] = (f_j(0), f_j(1))
FUNCTION_TABLE = ((0, 0), (1, 1), (0, 1), (1, 0))


@dataclass(frozen=True)
class LambdaInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (-TOL <= self.lo <= self.hi + TOL and self.hi <= 1.0 + TOL):
            raise ValueError(f"invalid lambda interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, value: float) -> bool:
        return self.lo - TOL <= value <= self.hi + TOL

    def as_list(self) -> list[float]:
        return [self.lo, self.hi]


@dataclass(frozen=True)
class PnsBounds:
    lo: float
    hi: float

    def __post_init__(self):
        if not (-TOL <= self.lo <= self.hi + TOL <= 1.0 + 2 * TOL):
            raise ValueError(f"invalid PNS bounds [{self.lo}, {self.hi}]")

    def as_list(self) -> list[float]:
        return [self.lo, self.hi]


def lambda_range(m: BinaryMarginal) -> LambdaInterval:
    m = as_marginal(m)
    p00, p01 = m.p_z0_w0, m.p_z0_w1
    return LambdaInterval(max(0.0, p00 + p01 - 1.0), min(p00, p01))


def check_lambda(m: BinaryMarginal, lam: float) -> float:
    """Return ``lam`` clamped into the feasible interval.

    Values more than 1e-12 outside the interval raise :class:`LambdaOutOfRange`.
    """
    rng = lambda_range(m)
    if not (rng.lo - TOL <= lam <= rng.hi + TOL):
        raise LambdaOutOfRange(f"lambda={lam!r} outside [{rng.lo!r}, {rng.hi!r}]")
    return min(max(float(lam), rng.lo), rng.hi)


def response_weights(m: BinaryMarginal, lam: float) -> np.ndarray:
    """Weights on {0, 1, ID, NOT} for the model indexed by ``lam``."""
    m = as_marginal(m)
    lam = check_lambda(m, lam)
    p00, p01 = m.p_z0_w0, m.p_z0_w1
    a = np.array([lam, 1.0 - p00 - p01 + lam, p00 - lam, p01 - lam])
    # clamp roundoff so the result is a probability vector
    return np.clip(a, 0.0, 1.0)


def pns_from_lambda(m: BinaryMarginal, lam: float) -> float:
    m = as_marginal(m)
    lam = check_lambda(m, lam)
    return max(m.p_z0_w0 - lam, 0.0)


def pns_bounds_single(m: BinaryMarginal) -> PnsBounds:
    """Tian-Pearl bounds ``max(0, p11 - p10) <= PNS <= min(p11, p00)``."""
    m = as_marginal(m)
    p00 = m.p_z0_w0
    p11 = 1.0 - m.p_z0_w1
    p10 = 1.0 - m.p_z0_w0
    return PnsBounds(max(0.0, p11 - p10), min(p11, p00))


def pns_bounds_from_lambda(m: BinaryMarginal, interval: LambdaInterval) -> PnsBounds:
    """Map a lambda interval through ``PNS = p00 - lam`` (endpoints swap)."""
    p00 = as_marginal(m).p_z0_w0
    return PnsBounds(max(p00 - interval.hi, 0.0), max(p00 - interval.lo, 0.0))


def counterfactual_influence(m: BinaryMarginal, lam: float) -> float:
    """Total weight on the non-constant functions, ``p00 + p01 - 2 lam``."""
    m = as_marginal(m)
    lam = check_lambda(m, lam)
    return min(max(m.p_z0_w0 + m.p_z0_w1 - 2.0 * lam, 0.0), 1.0)


def prob_sufficient_nonmonotonicity(m: BinaryMarginal, lam: float) -> float:
    """``P(Z=0 | W=0, Z=1, do(W=1)) = (p01 - lam) / P(Z=1 | W=0)``."""
    m = as_marginal(m)
    lam = check_lambda(m, lam)
    denom = 1.0 - m.p_z0_w0
    if denom <= 0.0:
        raise ConditioningEventNull("P(Z=1 | W=0) = 0")
    return max(m.p_z0_w1 - lam, 0.0) / denom


def prob_necessary_nonmonotonicity(m: BinaryMarginal, lam: float) -> float:
    """``P(Z=1 | W=1, Z=0, do(W=0)) = (p01 - lam) / P(Z=0 | W=1)``."""
    m = as_marginal(m)
    lam = check_lambda(m, lam)
    denom = m.p_z0_w1
    if denom <= 0.0:
        raise ConditioningEventNull("P(Z=0 | W=1) = 0")
    return max(m.p_z0_w1 - lam, 0.0) / denom
