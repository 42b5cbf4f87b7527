"""Maximum-entropy joint model over the consistency polytope.

Given nonnegativity, the band rows on ``Ac`` and ``Bc`` follow from the
equalities (``A`` and ``B`` have nonnegative entries), so the feasible set
is ``{c >= 0 : E c = d}``.  Coordinates that every feasible point sets to
zero are detected by linear programming and removed.  On the remaining
support the maximiser has the Gibbs form

    c_k  proportional to  exp(sum_j mu_j E'_jk)

where ``E'`` holds the equality rows other than sum-to-one, and ``mu``
minimises the convex dual ``log sum_k exp(E'^T mu)_k - mu . d'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .bounds import check_compatibility
from .errors import Incompatible, Infeasible, NoConvergence
from .polytope import N_FUNCTIONS, PolytopeSpec, build_polytope, build_x_only_polytope, is_member
from .scm import lambda_range, response_weights
from .simplex import linprog
from .trial_data import BinaryMarginal, as_marginal

SUPPORT_TOL = 1e-10
RESIDUAL_TOL = 1e-7
GRAD_TOL = 1e-12
MAX_ITER = 10_000
BASELINE_NOTE = "X-only polytope with the candidate's P(Y=0)"


@dataclass(frozen=True)
class MaxEntResult:
    c: np.ndarray
    entropy: float
    lambda_x: float
    iterations: int
    residual: float

    def to_dict(self) -> dict:
        return {
            "c": [float(v) for v in self.c],
            "entropy_bits": self.entropy,
            "lambda_x": self.lambda_x,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class EvidenceEntry:
    dataset_id: str
    entropy_after: float
    entropy_reduction: float
    baseline_entropy: float


@dataclass(frozen=True)
class EvidenceRanking:
    """Compatible candidates sorted by entropy reduction, largest first.

    Incompatible candidates carry unbounded evidence against ``mX`` and are
    listed separately with their violated conditions.
    """

    entries: tuple[EvidenceEntry, ...]
    incompatible: tuple[tuple[str, tuple[str, ...]], ...] = ()
    baseline: str = field(default=BASELINE_NOTE)

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline,
            "ranking": [
                {
                    "dataset_id": e.dataset_id,
                    "entropy_after": e.entropy_after,
                    "entropy_reduction": e.entropy_reduction,
                    "baseline_entropy": e.baseline_entropy,
                }
                for e in self.entries
            ],
            "incompatible": [{"dataset_id": i, "violated": list(v)} for i, v in self.incompatible],
        }


def entropy_bits_of(c) -> float:
    c = np.asarray(c, dtype=float)
    c = c[c > 0.0]
    return float(-(c * np.log2(c)).sum()) + 0.0


def feasible_support(E: np.ndarray, d: np.ndarray, tol: float = SUPPORT_TOL) -> np.ndarray:
    """Boolean mask of coordinates that some point of ``{c>=0 : Ec=d}`` makes positive.

    Raises :class:`Infeasible` if the set is empty.
    """
    n = E.shape[1]
    known = np.zeros(n, dtype=bool)
    decided = np.zeros(n, dtype=bool)
    first = linprog(np.zeros(n), A_eq=E, b_eq=d)
    known |= first.x > tol
    decided |= known
    for k in range(n):
        if decided[k]:
            continue
        obj = np.zeros(n)
        obj[k] = 1.0
        res = linprog(obj, A_eq=E, b_eq=d, sense="max")
        hits = res.x > tol
        known |= hits
        decided |= hits
        decided[k] = True
    return known


def _independent_rows(E: np.ndarray, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal rows spanning the row space of ``E``, with matching right-hand side."""
    u, s, vt = np.linalg.svd(E, full_matrices=False)
    r = int(np.sum(s > 1e-10 * max(s[0], 1.0))) if s.size else 0
    return vt[:r], (u[:, :r].T @ d) / s[:r]


def _solve_dual(E: np.ndarray, d: np.ndarray, max_iter: int) -> tuple[np.ndarray, int]:
    """Minimise ``logsumexp(E^T mu) - mu.d`` by damped Newton steps."""
    E, d = _independent_rows(E, d)
    mu = np.zeros(E.shape[0])

    def dual(mu):
        s = E.T @ mu
        top = s.max()
        w = np.exp(s - top)
        z = w.sum()
        return top + np.log(z) - mu @ d, w / z

    g, c = dual(mu)
    for it in range(1, max_iter + 1):
        grad = E @ c - d
        if np.linalg.norm(grad) <= GRAD_TOL:
            return c, it - 1
        cov = np.diag(c) - np.outer(c, c)
        H = E @ cov @ E.T
        step = -np.linalg.lstsq(H, grad, rcond=None)[0]
        slope = grad @ step
        if slope >= 0.0:
            step, slope = -grad, -(grad @ grad)
        if -slope <= 1e-13 * max(1.0, abs(g)):
            # dual values no longer resolve the decrease; judge by the gradient
            g_new, c_new = dual(mu + step)
            if np.linalg.norm(E @ c_new - d) >= np.linalg.norm(grad):
                return c, it
            mu, g, c = mu + step, g_new, c_new
            continue
        t = 1.0
        while True:
            g_new, c_new = dual(mu + t * step)
            if g_new <= g + 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 1e-14:
                # no further decrease is representable
                return c, it
        mu = mu + t * step
        g, c = g_new, c_new
    raise NoConvergence(f"dual Newton did not converge in {max_iter} iterations")


def maxent_scm(spec: PolytopeSpec, max_iter: int = MAX_ITER) -> MaxEntResult:
    """Entropy-maximising member of the polytope.

    Raises :class:`Incompatible` when the polytope is empty and
    :class:`NoConvergence` when the equality residual stays above 1e-7.
    """
    E, d = spec.equalities()
    try:
        support = feasible_support(E, d)
    except Infeasible as exc:
        raise Incompatible("consistency polytope is empty") from exc
    idx = np.flatnonzero(support)
    c = np.zeros(N_FUNCTIONS)
    iterations = 0
    if idx.size == 1:
        c[idx] = 1.0
    else:
        # the last row is sum-to-one, carried by the normalisation
        c_s, iterations = _solve_dual(E[:-1][:, idx], d[:-1], max_iter)
        c[idx] = c_s
    residual = float(np.abs(E @ c - d).max())
    if residual > RESIDUAL_TOL or not is_member(c, spec, tol=RESIDUAL_TOL):
        raise NoConvergence(f"maxent residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    return MaxEntResult(c, entropy_bits_of(c), spec.lambda_x_of(c), iterations, residual)


def maxent_lambda_single(m: BinaryMarginal) -> float:
    """Entropy-maximising ``lam`` for one marginal, ``p00 * p01``.

    Setting the derivative of ``H(a(lam))`` to zero gives
    ``(p00 - lam)(p01 - lam) = lam (1 - p00 - p01 + lam)``.  When the
    interval is a single point that point is returned.
    """
    m = as_marginal(m)
    rng = lambda_range(m)
    return min(max(m.p_z0_w0 * m.p_z0_w1, rng.lo), rng.hi)


def single_entropy(m: BinaryMarginal, lam: float) -> float:
    """Entropy in bits of the four response-function weights at ``lam``."""
    return entropy_bits_of(response_weights(m, lam))


def rank_evidence(
    mX: BinaryMarginal,
    candidates: Sequence[BinaryMarginal] | Mapping[str, BinaryMarginal],
) -> EvidenceRanking:
    """Rank candidate Y-trials by how much they lower the MaxEnt entropy.

    The baseline for each candidate is the MaxEnt entropy of the polytope
    constrained by ``mX`` alone, built with that candidate's ``P(Y=0)``.
    """
    mX = as_marginal(mX)
    items = candidates.items() if isinstance(candidates, Mapping) else ((str(i), m) for i, m in enumerate(candidates))
    entries, incompatible = [], []
    for dataset_id, mY in items:
        mY = as_marginal(mY)
        report = check_compatibility(mX, mY)
        if not report.compatible:
            incompatible.append((dataset_id, report.violated))
            continue
        after = maxent_scm(build_polytope(mX, mY)).entropy
        base = maxent_scm(build_x_only_polytope(mX, mY.p_w0)).entropy
        entries.append(EvidenceEntry(dataset_id, after, base - after, base))
    entries.sort(key=lambda e: -e.entropy_reduction)
    return EvidenceRanking(tuple(entries), tuple(incompatible))
