"""Restricting lambda_X (and hence PNS) by merging two trials.

Two routes are provided.  The numeric route solves linear programs over the
consistency polytope.  When the Y-trial has a degenerate conditional
(``P(Z=0|Y=y)`` equal to 0 or 1) a closed form applies:

    lambda_X >= max(lambda_X_min, Phi_X + D0, D1)
    Phi_X = p00 + p01 - 1
    D0 = 1{p'00 = 0} P(Y=0) + 1{p'01 = 0} P(Y=1)
    D1 = 1{p'00 = 1} P(Y=0) + 1{p'01 = 1} P(Y=1)

and the upper end ``lambda_X_max`` is never moved.

Both trials must describe the same outcome: every joint model reproduces a
single ``P(Z)``, so marginals whose outcome rates differ are incompatible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import Incompatible, Infeasible, NotDegenerate
from .polytope import PolytopeSpec, build_polytope, is_member
from .scm import LambdaInterval, PnsBounds, lambda_range, pns_bounds_from_lambda
from .simplex import FEAS_TOL, linprog
from .trial_data import TOL, BinaryMarginal, as_marginal

OUTCOME_TOL = 1e-9
BINDING_CASES = ("none", "phi_d0", "d1", "lp", "infeasible")


class LPSolution(NamedTuple):
    value: float
    c: np.ndarray


class CompatibilityReport(NamedTuple):
    compatible: bool
    violated: tuple[str, ...]


@dataclass(frozen=True)
class DegeneracyProfile:
    p00_is_0: bool
    p01_is_0: bool
    p00_is_1: bool
    p01_is_1: bool

    @property
    def is_degenerate(self) -> bool:
        return self.p00_is_0 or self.p01_is_0 or self.p00_is_1 or self.p01_is_1

    def flags(self) -> list[str]:
        names = ("p'00=0", "p'01=0", "p'00=1", "p'01=1")
        values = (self.p00_is_0, self.p01_is_0, self.p00_is_1, self.p01_is_1)
        return [n for n, v in zip(names, values) if v]


@dataclass(frozen=True)
class TightenedBounds:
    lam: LambdaInterval
    pns: PnsBounds
    binding_case: str

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam.as_list(),
            "pns": self.pns.as_list(),
            "compatible": True,
            "binding_case": self.binding_case,
        }


def degeneracy_profile(mY: BinaryMarginal) -> DegeneracyProfile:
    mY = as_marginal(mY)
    a, b = mY.p_z0_w0, mY.p_z0_w1
    return DegeneracyProfile(a <= TOL, b <= TOL, a >= 1.0 - TOL, b >= 1.0 - TOL)


def outcome_mismatch(mX: BinaryMarginal, mY: BinaryMarginal) -> float:
    """Absolute difference of the two trials' ``P(Z=0)``."""
    return abs(as_marginal(mX).p_z0 - as_marginal(mY).p_z0)


def solve_lp(objective, spec: PolytopeSpec, sense: str = "min") -> LPSolution:
    """Optimise a linear objective over the polytope.

    Raises :class:`Infeasible` when the polytope is empty.
    """
    At, bt = spec.inequalities()
    # nonnegativity rows are carried by the variable bounds
    At, bt = At[:-16], bt[:-16]
    Ct, dt = spec.equalities()
    res = linprog(objective, A_ub=At, b_ub=bt, A_eq=Ct, b_eq=dt, sense=sense)
    c = np.clip(res.x, 0.0, None)
    if not is_member(c, spec):
        raise Infeasible("simplex certificate failed the membership re-check")
    return LPSolution(float(np.asarray(objective, dtype=float) @ c), c)


def lp_lambda_extremes(spec: PolytopeSpec) -> tuple[LPSolution, LPSolution]:
    """LP minimum and maximum of ``[Ac]_0``."""
    return solve_lp(spec.A[0], spec, "min"), solve_lp(spec.A[0], spec, "max")


def is_feasible(mX: BinaryMarginal, mY: BinaryMarginal) -> bool:
    try:
        solve_lp(np.zeros(16), build_polytope(mX, mY))
    except Infeasible:
        return False
    return True


def restricted_lambda_range(mX: BinaryMarginal, mY: BinaryMarginal) -> LambdaInterval:
    """Range of lambda_X surviving the merge, computed by linear programming."""
    mX, mY = as_marginal(mX), as_marginal(mY)
    spec = build_polytope(mX, mY)
    try:
        low = solve_lp(spec.A[0], spec, "min")
    except Infeasible as exc:
        raise Incompatible("consistency polytope is empty", _violated_general(mX, mY)) from exc
    single = lambda_range(mX)
    lo = min(max(single.lo, low.value), single.hi)
    return LambdaInterval(lo, single.hi)


def _violated_general(mX, mY) -> list[str]:
    if outcome_mismatch(mX, mY) > OUTCOME_TOL:
        return ["shared outcome marginal P(Z=0)"]
    return ["consistency polytope empty"]


def _case_conditions(q00: float, q01: float, w: float, label: str, wname: str) -> list[tuple[str, bool]]:
    """Four inequalities for a case in which one outcome value needs ``Y=y``.

    ``q00``/``q01`` are the X-trial's rates of that outcome value and
    ``w = P(Y=y)``; ``qmax`` is the largest weight the constant function
    producing that value can carry.
    """
    qmax = min(q00, q01)
    t = FEAS_TOL
    return [
        (f"[{label}] lambda_max <= {wname}", qmax <= w + t),
        (f"[{label}] q01 - lambda_max <= {wname}", q01 - qmax <= w + t),
        (f"[{label}] q00 - lambda_max <= {wname}", q00 - qmax <= w + t),
        (f"[{label}] lambda_max >= q00 + q01 - {wname}", qmax >= q00 + q01 - w - t),
    ]


def degenerate_compatibility(mX: BinaryMarginal, mY: BinaryMarginal) -> CompatibilityReport:
    """Closed-form compatibility certificate for a degenerate Y-trial.

    Each degenerate conditional of the Y-trial contributes four inequalities
    (obtained by evaluating the candidate point with ``[Ac]_0 = lambda_X_max``);
    the outcome marginals must also agree.  In the conditions, ``q0x`` is the
    X-trial's rate of the outcome value that the degenerate conditional rules
    out for one Y arm: ``q0x = p0x`` when ``P(Z=0|Y=y) = 0`` and
    ``q0x = 1 - p0x`` when ``P(Z=0|Y=y) = 1``.
    """
    mX, mY = as_marginal(mX), as_marginal(mY)
    prof = degeneracy_profile(mY)
    if not prof.is_degenerate:
        raise NotDegenerate("Y-trial has no degenerate conditional")
    p00, p01 = mX.p_z0_w0, mX.p_z0_w1
    pY0, pY1 = mY.p_w0, mY.p_w1
    checks = [("shared outcome marginal P(Z=0)", outcome_mismatch(mX, mY) <= OUTCOME_TOL)]
    # p'0y = 0: Z=0 only occurs in the other Y arm
    if prof.p01_is_0:
        checks += _case_conditions(p00, p01, pY0, "p'01=0", "P(Y=0)")
    if prof.p00_is_0:
        checks += _case_conditions(p00, p01, pY1, "p'00=0", "P(Y=1)")
    # p'0y = 1: Z=1 only occurs in the other Y arm
    if prof.p00_is_1:
        checks += _case_conditions(1.0 - p00, 1.0 - p01, pY1, "p'00=1", "P(Y=1)")
    if prof.p01_is_1:
        checks += _case_conditions(1.0 - p00, 1.0 - p01, pY0, "p'01=1", "P(Y=0)")
    violated = tuple(name for name, ok in checks if not ok)
    return CompatibilityReport(not violated, violated)


def _d_terms(mY: BinaryMarginal) -> tuple[float, float]:
    prof = degeneracy_profile(mY)
    d0 = prof.p00_is_0 * mY.p_w0 + prof.p01_is_0 * mY.p_w1
    d1 = prof.p00_is_1 * mY.p_w0 + prof.p01_is_1 * mY.p_w1
    return float(d0), float(d1)


def _closed_form(mX: BinaryMarginal, mY: BinaryMarginal) -> tuple[float, str]:
    report = degenerate_compatibility(mX, mY)
    if not report.compatible:
        raise Incompatible("degenerate compatibility conditions fail", report.violated)
    single = lambda_range(mX)
    phi = mX.p_z0_w0 + mX.p_z0_w1 - 1.0
    d0, d1 = _d_terms(mY)
    lo = max(single.lo, phi + d0, d1)
    if lo <= single.lo + FEAS_TOL:
        case = "none"
    elif phi + d0 >= d1:
        case = "phi_d0"
    else:
        case = "d1"
    return min(lo, single.hi), case


def closed_form_lambda_min(mX: BinaryMarginal, mY: BinaryMarginal) -> float:
    mX, mY = as_marginal(mX), as_marginal(mY)
    return _closed_form(mX, mY)[0]


def tightened_pns_bounds(mX: BinaryMarginal, mY: BinaryMarginal, verify: bool = False) -> TightenedBounds:
    """PNS bounds after merging the two trials.

    Degenerate Y-trials use the closed form; others use the LP.  With
    ``verify=True`` the degenerate closed form is re-derived by LP and a
    disagreement above 1e-9 raises ``ArithmeticError``.
    """
    mX, mY = as_marginal(mX), as_marginal(mY)
    single = lambda_range(mX)
    if degeneracy_profile(mY).is_degenerate:
        lo, case = _closed_form(mX, mY)
        if verify:
            lp = restricted_lambda_range(mX, mY)
            if abs(lp.lo - lo) > 1e-9:
                raise ArithmeticError(f"closed form {lo!r} disagrees with LP {lp.lo!r}")
    else:
        lo = restricted_lambda_range(mX, mY).lo
        case = "lp" if lo > single.lo + FEAS_TOL else "none"
    lam = LambdaInterval(lo, single.hi)
    return TightenedBounds(lam, pns_bounds_from_lambda(mX, lam), case)


def check_compatibility(mX: BinaryMarginal, mY: BinaryMarginal) -> CompatibilityReport:
    """Certificate for degenerate Y-trials, LP feasibility otherwise."""
    mX, mY = as_marginal(mX), as_marginal(mY)
    if degeneracy_profile(mY).is_degenerate:
        return degenerate_compatibility(mX, mY)
    if is_feasible(mX, mY):
        return CompatibilityReport(True, ())
    return CompatibilityReport(False, tuple(_violated_general(mX, mY)))
