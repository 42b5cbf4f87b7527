"""Bivariate response functions and the consistency polytope.

Function ``k`` in 0..15 is ``h_k(x, y) = bit_{2x+y}(k)``.  The consistency
matrices map a 16-vector ``c`` over bivariate functions to the 4-vectors
of the single-treatment models:

    A[j, k] = sum_y P(Y=y) 1{h_k(., y) == f_j}
    B[j, k] = sum_x P(X=x) 1{h_k(x, .) == f_j}

The polytope is ``{c : Ã c <= b̃, C̃ c = d̃}`` with the band rows on ``Ac`` and
``Bc``, nonnegativity, and the three invariant combinations of each 4-vector
plus sum-to-one as equalities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .scm import FUNCTION_TABLE, LambdaInterval, lambda_range
from .trial_data import BinaryMarginal, TrivariateTable, as_marginal

N_FUNCTIONS = 16
MEMBER_TOL = 1e-9

# Rows combining a 4-vector into quantities that do not depend on lambda:
# a0 - a1, a0 + a2 = P(Z=0|W=0), a0 + a3 = P(Z=0|W=1).
INVARIANT_ROWS = np.array([[1.0, -1.0, 0.0, 0.0], [1.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0]])
LAMBDA_DIRECTION = np.array([1.0, 1.0, -1.0, -1.0])

_INDEX_OF = {table: j for j, table in enumerate(FUNCTION_TABLE)}


@lru_cache(maxsize=None)
def enumerate_bivariate_functions() -> np.ndarray:
    """Return the 16x2x2 table ``h[k, x, y]``."""
    h = np.zeros((N_FUNCTIONS, 2, 2), dtype=np.int8)
    for k in range(N_FUNCTIONS):
        for x in (0, 1):
            for y in (0, 1):
                h[k, x, y] = (k >> (2 * x + y)) & 1
    h.setflags(write=False)
    return h


def project(k: int, axis: str, value: int) -> int:
    """Univariate function index of ``h_k`` with one argument fixed.

    ``axis="Y"`` fixes ``y`` and returns ``f(x)``; ``axis="X"`` fixes ``x``
    and returns ``f(y)``.
    """
    if not 0 <= k < N_FUNCTIONS:
        raise ValueError(f"function index {k} outside 0..15")
    h = enumerate_bivariate_functions()
    if axis == "Y":
        table = (int(h[k, 0, value]), int(h[k, 1, value]))
    elif axis == "X":
        table = (int(h[k, value, 0]), int(h[k, value, 1]))
    else:
        raise ValueError(f"axis must be 'X' or 'Y', got {axis!r}")
    return _INDEX_OF[table]


def consistency_matrix(axis: str, p_fixed0: float) -> np.ndarray:
    """4x16 matrix averaging projections over the fixed variable.

    For ``axis="Y"`` this is ``A`` with ``p_fixed0 = P(Y=0)``; for
    ``axis="X"`` it is ``B`` with ``p_fixed0 = P(X=0)``.
    """
    M = np.zeros((4, N_FUNCTIONS))
    weights = (p_fixed0, 1.0 - p_fixed0)
    for k in range(N_FUNCTIONS):
        for v in (0, 1):
            M[project(k, axis, v), k] += weights[v]
    return M


def base_vector(m: BinaryMarginal) -> np.ndarray:
    p00, p01 = m.p_z0_w0, m.p_z0_w1
    return np.array([0.0, 1.0 - p00 - p01, p00, p01])


def _band(base: np.ndarray, interval: LambdaInterval) -> tuple[np.ndarray, np.ndarray]:
    upper = base + np.array([interval.hi, interval.hi, -interval.lo, -interval.lo])
    neg_lower = -base + np.array([-interval.lo, -interval.lo, interval.hi, interval.hi])
    return upper, neg_lower


@dataclass(frozen=True)
class PolytopeSpec:
    """Matrices and bounds describing the consistency polytope.

    With ``y_constrained=False`` the B rows are omitted, giving the set of
    joint models constrained by the X-trial alone (same ``P(Y)``).
    """

    A: np.ndarray
    B: np.ndarray
    a0: np.ndarray
    b0: np.ndarray
    lamX: LambdaInterval
    lamY: LambdaInterval
    pY0: float
    pX0: float
    y_constrained: bool = True
    mX: BinaryMarginal | None = field(default=None, compare=False)
    mY: BinaryMarginal | None = field(default=None, compare=False)

    def inequalities(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(Ã, b̃)``; nonnegativity rows come last."""
        a1, a2 = _band(self.a0, self.lamX)
        blocks = [self.A, -self.A]
        rhs = [a1, a2]
        if self.y_constrained:
            b1, b2 = _band(self.b0, self.lamY)
            blocks += [self.B, -self.B]
            rhs += [b1, b2]
        blocks.append(-np.eye(N_FUNCTIONS))
        rhs.append(np.zeros(N_FUNCTIONS))
        return np.vstack(blocks), np.concatenate(rhs)

    def equalities(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(C̃, d̃)``: three rows per marginal and sum-to-one."""
        rows = [INVARIANT_ROWS @ self.A]
        rhs = [INVARIANT_ROWS @ self.a0]
        if self.y_constrained:
            rows.append(INVARIANT_ROWS @ self.B)
            rhs.append(INVARIANT_ROWS @ self.b0)
        rows.append(np.ones((1, N_FUNCTIONS)))
        rhs.append(np.ones(1))
        return np.vstack(rows), np.concatenate(rhs)

    def lambda_x_of(self, c: np.ndarray) -> float:
        return float(self.A[0] @ c)

    def to_dict(self) -> dict:
        At, bt = self.inequalities()
        Ct, dt = self.equalities()
        return {
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "a0": self.a0.tolist(),
            "b0": self.b0.tolist(),
            "lamX": self.lamX.as_list(),
            "lamY": self.lamY.as_list(),
            "pY0": self.pY0,
            "pX0": self.pX0,
            "y_constrained": self.y_constrained,
            "A_tilde": At.tolist(),
            "b_tilde": bt.tolist(),
            "C_tilde": Ct.tolist(),
            "d_tilde": dt.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def build_polytope(mX: BinaryMarginal, mY: BinaryMarginal) -> PolytopeSpec:
    mX, mY = as_marginal(mX), as_marginal(mY)
    return PolytopeSpec(
        A=consistency_matrix("Y", mY.p_w0),
        B=consistency_matrix("X", mX.p_w0),
        a0=base_vector(mX),
        b0=base_vector(mY),
        lamX=lambda_range(mX),
        lamY=lambda_range(mY),
        pY0=mY.p_w0,
        pX0=mX.p_w0,
        mX=mX,
        mY=mY,
    )


def build_x_only_polytope(mX: BinaryMarginal, pY0: float) -> PolytopeSpec:
    """Polytope constrained by the X-trial only, for a given ``P(Y=0)``."""
    mX = as_marginal(mX)
    if not 0.0 < pY0 < 1.0:
        raise ValueError(f"pY0={pY0!r} must lie strictly between 0 and 1")
    return PolytopeSpec(
        A=consistency_matrix("Y", pY0),
        B=consistency_matrix("X", mX.p_w0),
        a0=base_vector(mX),
        b0=np.zeros(4),
        lamX=lambda_range(mX),
        lamY=LambdaInterval(0.0, 1.0),
        pY0=pY0,
        pX0=mX.p_w0,
        y_constrained=False,
        mX=mX,
    )


def is_member(c, spec: PolytopeSpec, tol: float = MEMBER_TOL) -> bool:
    c = np.asarray(c, dtype=float)
    if c.shape != (N_FUNCTIONS,) or not np.all(np.isfinite(c)):
        return False
    At, bt = spec.inequalities()
    if np.any(At @ c > bt + tol):
        return False
    Ct, dt = spec.equalities()
    return bool(np.all(np.abs(Ct @ c - dt) <= tol))


def joint_distribution(c, pX0: float, pY0: float) -> TrivariateTable:
    """``P(X, Y, Z)`` of the joint model with independent ``X``, ``Y``.

    Returns a table indexed ``[x][y][z]``.
    """
    c = np.asarray(c, dtype=float)
    h = enumerate_bivariate_functions()
    # probability that Z=1 for each (x, y)
    z1 = np.clip(np.einsum("k,kxy->xy", c, h), 0.0, 1.0)
    pxy = np.outer([pX0, 1.0 - pX0], [pY0, 1.0 - pY0])
    p = np.stack([pxy * (1.0 - z1), pxy * z1], axis=-1)
    return TrivariateTable(p / p.sum())
