"""Brute-force verifiers for small instances.

The grid oracles eliminate the equality constraints (zero-forcing rows, then
reduced row echelon form), enumerate a regular grid over the remaining free
coordinates and keep the points that land in the polytope.  Grid points are
a subset of the polytope, so grid intervals sit inside the exact ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningEventNull, DimensionTooHigh, Infeasible
from .maxent import entropy_bits_of
from .polytope import N_FUNCTIONS, PolytopeSpec
from .scm import FUNCTION_TABLE, LambdaInterval, response_weights
from .trial_data import BinaryMarginal, as_marginal

ZERO_TOL = 1e-12
MEMBER_TOL = 1e-9
CHUNK = 200_000


@dataclass(frozen=True)
class GridSpec:
    resolution: int = 200
    dimension_cap: int = 3

    def __post_init__(self):
        if int(self.resolution) != self.resolution or self.resolution < 10:
            raise ValueError(f"resolution must be an integer >= 10, got {self.resolution!r}")
        if int(self.dimension_cap) != self.dimension_cap or not 1 <= self.dimension_cap <= 4:
            raise ValueError(f"dimension_cap must lie in 1..4, got {self.dimension_cap!r}")


@dataclass(frozen=True)
class Elimination:
    """Affine parametrisation ``c = offset + basis @ t`` of the equality set.

    ``free`` lists the coordinates of ``c`` used as grid parameters ``t``.
    """

    offset: np.ndarray
    basis: np.ndarray
    free: tuple[int, ...]
    forced_zero: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.free)


def forced_zeros(E: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Coordinates that ``E c = d`` with ``c >= 0`` and ``sum c = 1`` pins to zero.

    A row with nonnegative coefficients and zero right-hand side zeroes every
    coordinate it touches; subtracting a row from the sum-to-one row gives a
    second candidate of the same shape.
    """
    n = E.shape[1]
    zero = np.zeros(n, dtype=bool)
    rows = [(E[i], d[i]) for i in range(E.shape[0])]
    rows += [(-r, -v) for r, v in rows] + [(1.0 - r, 1.0 - v) for r, v in rows]
    changed = True
    while changed:
        changed = False
        for r, v in rows:
            live = ~zero
            coeff = np.where(live, r, 0.0)
            if abs(v) <= ZERO_TOL and np.all(coeff >= -ZERO_TOL):
                hit = live & (coeff > ZERO_TOL)
                if hit.any():
                    zero |= hit
                    changed = True
    return zero


def rref(M: np.ndarray, tol: float = ZERO_TOL) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with partial pivoting; returns (R, pivot columns)."""
    R = np.array(M, dtype=float)
    rows, cols = R.shape
    pivots = []
    r = 0
    for j in range(cols - 1):  # last column is the right-hand side
        if r == rows:
            break
        i = r + int(np.argmax(np.abs(R[r:, j])))
        if abs(R[i, j]) <= tol:
            continue
        R[[r, i]] = R[[i, r]]
        R[r] /= R[r, j]
        for k in range(rows):
            if k != r:
                R[k] -= R[k, j] * R[r]
        pivots.append(j)
        r += 1
    R[np.abs(R) < tol] = 0.0
    return R, pivots


def eliminate(spec: PolytopeSpec) -> Elimination:
    E, d = spec.equalities()
    zero = forced_zeros(E, d)
    live = np.flatnonzero(~zero)
    R, pivots = rref(np.column_stack([E[:, live], d]))
    rank = len(pivots)
    if np.any(np.abs(R[rank:, -1]) > MEMBER_TOL):
        raise Infeasible("equality constraints are inconsistent")
    free_local = [j for j in range(live.size) if j not in pivots]
    offset = np.zeros(N_FUNCTIONS)
    basis = np.zeros((N_FUNCTIONS, len(free_local)))
    for row, pj in enumerate(pivots):
        offset[live[pj]] = R[row, -1]
        for t, fj in enumerate(free_local):
            basis[live[pj], t] = -R[row, fj]
    for t, fj in enumerate(free_local):
        basis[live[fj], t] = 1.0
    return Elimination(offset, basis, tuple(int(live[j]) for j in free_local), tuple(np.flatnonzero(zero).tolist()))


def _grid_points(dim: int, resolution: int):
    """Yield chunks of grid points in ``[0,1]^dim`` whose coordinates sum to at most 1."""
    if dim == 0:
        yield np.zeros((1, 0))
        return
    steps = np.arange(resolution + 1)
    buf = []
    for head in itertools.product(steps, repeat=dim - 1):
        room = resolution - sum(head)
        if room < 0:
            continue
        tail = steps[: room + 1]
        block = np.empty((tail.size, dim))
        block[:, : dim - 1] = head
        block[:, -1] = tail
        buf.append(block)
        if sum(b.shape[0] for b in buf) >= CHUNK:
            yield np.vstack(buf) / resolution
            buf = []
    if buf:
        yield np.vstack(buf) / resolution


def grid_members(spec: PolytopeSpec, g: GridSpec):
    """Yield chunks of grid points of the polytope as rows of 16-vectors."""
    elim = eliminate(spec)
    if elim.dimension > g.dimension_cap:
        raise DimensionTooHigh(f"free dimension {elim.dimension} exceeds cap {g.dimension_cap}")
    At, bt = spec.inequalities()
    Ct, dt = spec.equalities()
    tol_ub = MEMBER_TOL * np.maximum(1.0, np.linalg.norm(At, axis=1))
    tol_eq = MEMBER_TOL * np.maximum(1.0, np.linalg.norm(Ct, axis=1))
    for t in _grid_points(elim.dimension, g.resolution):
        C = elim.offset + t @ elim.basis.T
        ok = np.all(C @ At.T <= bt + tol_ub, axis=1)
        ok &= np.all(np.abs(C @ Ct.T - dt) <= tol_eq, axis=1)
        if ok.any():
            yield np.clip(C[ok], 0.0, None)


def grid_lambda_range(spec: PolytopeSpec, g: GridSpec = GridSpec()) -> LambdaInterval:
    """Min and max of ``[Ac]_0`` over grid members of the polytope.

    Raises :class:`Infeasible` when no grid point is a member; at coarse
    resolution that outcome is inconclusive.
    """
    lo, hi = np.inf, -np.inf
    for C in grid_members(spec, g):
        lam = C @ spec.A[0]
        lo, hi = min(lo, lam.min()), max(hi, lam.max())
    if lo > hi:
        raise Infeasible(f"no grid point at resolution {g.resolution} lies in the polytope")
    return LambdaInterval(float(lo), float(hi))


def grid_maxent(spec: PolytopeSpec, g: GridSpec = GridSpec()) -> tuple[float, np.ndarray]:
    """Largest entropy (bits) over grid members and the point attaining it."""
    best, arg = -np.inf, None
    for C in grid_members(spec, g):
        with np.errstate(divide="ignore", invalid="ignore"):
            H = -np.where(C > 0.0, C * np.log2(np.where(C > 0.0, C, 1.0)), 0.0).sum(axis=1)
        i = int(np.argmax(H))
        if H[i] > best:
            best, arg = float(H[i]), C[i]
    if arg is None:
        raise Infeasible(f"no grid point at resolution {g.resolution} lies in the polytope")
    return entropy_bits_of(arg), arg


QUERIES = ("pns", "suff_nonmono", "nec_nonmono")


def abduction_oracle(m: BinaryMarginal, lam: float, query: str) -> float:
    """Counterfactual probability by enumerating the four response functions.

    ``pns`` is ``P(Z_{W=0}=0, Z_{W=1}=1)``.  ``suff_nonmono`` conditions on
    ``W=0, Z=1`` and asks for ``Z=0`` under ``do(W=1)``; ``nec_nonmono``
    conditions on ``W=1, Z=0`` and asks for ``Z=1`` under ``do(W=0)``.
    """
    m = as_marginal(m)
    a = response_weights(m, lam)
    if query == "pns":
        return float(sum(a[n] for n, f in enumerate(FUNCTION_TABLE) if f == (0, 1)))
    if query == "suff_nonmono":
        w_obs, z_obs, w_do, z_target = 0, 1, 1, 0
    elif query == "nec_nonmono":
        w_obs, z_obs, w_do, z_target = 1, 0, 0, 1
    else:
        raise ValueError(f"query must be one of {QUERIES}, got {query!r}")
    # abduction: the treatment is independent of the noise, so P(n | w, z) is
    # proportional to a_n over the functions reproducing the evidence
    posterior = np.array([a[n] if f[w_obs] == z_obs else 0.0 for n, f in enumerate(FUNCTION_TABLE)])
    mass = posterior.sum()
    if mass <= 0.0:
        raise ConditioningEventNull(f"P(Z={z_obs} | W={w_obs}) = 0")
    # action and prediction
    hit = np.array([f[w_do] == z_target for f in FUNCTION_TABLE])
    return float(posterior[hit].sum() / mass)
