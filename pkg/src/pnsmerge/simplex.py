"""Dense two-phase simplex with Bland's anti-cycling rule.

Solves ``min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``,
``x >= 0``.  Intended for the small, highly degenerate programs that arise
from the consistency polytope; every pivot uses Bland's rule so degenerate
stalls cannot cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, NoConvergence, Unbounded

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-9


@dataclass(frozen=True)
class LPResult:
    value: float
    x: np.ndarray
    iterations: int


class TwoPhaseSimplex:
    """Single-use solver; the tableau is mutated in place by :meth:`solve`."""

    def __init__(self, c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, max_iter=10_000):
        self.c = np.asarray(c, dtype=float)
        n = self.c.size
        A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
        A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
        b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
        b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
        self.n = n
        self.max_iter = max_iter
        self.iterations = 0
        self._used = False

        m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
        m = m_ub + m_eq
        A = np.zeros((m, n + m_ub))
        A[:m_ub, :n] = A_ub
        A[:m_ub, n:] = np.eye(m_ub)
        A[m_ub:, :n] = A_eq
        b = np.concatenate([b_ub, b_eq])
        flip = b < 0
        A[flip] *= -1.0
        b = np.where(flip, -b, b)

        # slack columns that are +e_i can start in the basis
        basis = np.full(m, -1)
        for i in range(m_ub):
            if not flip[i]:
                basis[i] = n + i
        need_art = np.flatnonzero(basis < 0)
        n_struct = n + m_ub
        T = np.zeros((m + 1, n_struct + need_art.size + 1))
        T[:m, :n_struct] = A
        T[:m, -1] = b
        for a, i in enumerate(need_art):
            T[i, n_struct + a] = 1.0
            basis[i] = n_struct + a
        self.T = T
        self.basis = basis
        self.n_struct = n_struct

    def _price(self, cost: np.ndarray) -> None:
        m = self.basis.size
        self.T[m, :] = 0.0
        self.T[m, : cost.size] = cost
        for i, j in enumerate(self.basis):
            cj = self.T[m, j]
            if cj != 0.0:
                self.T[m] -= cj * self.T[i]

    def _pivot(self, i: int, j: int) -> None:
        T = self.T
        T[i] /= T[i, j]
        col = T[:, j].copy()
        col[i] = 0.0
        T -= np.outer(col, T[i])
        T[np.abs(T) < 1e-15] = 0.0
        self.basis[i] = j
        self.iterations += 1

    def _iterate(self, n_cols: int) -> None:
        T = self.T
        m = self.basis.size
        while True:
            if self.iterations >= self.max_iter:
                raise NoConvergence(f"simplex exceeded {self.max_iter} pivots")
            reduced = T[m, :n_cols]
            candidates = np.flatnonzero(reduced < -PIVOT_TOL)
            if candidates.size == 0:
                return
            j = int(candidates[0])
            col = T[:m, j]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                raise Unbounded("objective is unbounded below")
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
            i = int(ties[np.argmin(self.basis[ties])])
            self._pivot(i, j)

    def solve(self) -> LPResult:
        if self._used:
            raise RuntimeError("TwoPhaseSimplex instances are single-use")
        self._used = True
        n_total = self.T.shape[1] - 1
        m = self.basis.size

        if n_total > self.n_struct:
            phase1 = np.zeros(n_total)
            phase1[self.n_struct:] = 1.0
            self._price(phase1)
            self._iterate(n_total)
            if -self.T[m, -1] > FEAS_TOL:
                raise Infeasible(f"phase-one residual {-self.T[m, -1]:.3e}")
            self._drive_out_artificials()

        self._price(np.concatenate([self.c, np.zeros(self.n_struct - self.n)]))
        self._iterate(self.n_struct)
        x = np.zeros(self.n_struct)
        for i, j in enumerate(self.basis):
            x[j] = self.T[i, -1]
        x = np.where(np.abs(x) < FEAS_TOL, np.maximum(x, 0.0), x)
        x = x[: self.n]
        return LPResult(float(self.c @ x), x, self.iterations)

    def _drive_out_artificials(self) -> None:
        keep = []
        for i in range(self.basis.size):
            if self.basis[i] >= self.n_struct:
                row = self.T[i, : self.n_struct]
                nz = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                if nz.size == 0:
                    continue  # redundant equality
                self._pivot(i, int(nz[0]))
            keep.append(i)
        m = self.basis.size
        rows = keep + [m]
        cols = list(range(self.n_struct)) + [self.T.shape[1] - 1]
        self.T = self.T[np.ix_(rows, cols)]
        self.basis = self.basis[keep]


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, sense="min", max_iter=10_000) -> LPResult:
    """Solve a small LP; ``sense`` is ``"min"`` or ``"max"``.

    Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    c = np.asarray(c, dtype=float)
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    sign = 1.0 if sense == "min" else -1.0
    res = TwoPhaseSimplex(sign * c, A_ub, b_ub, A_eq, b_eq, max_iter=max_iter).solve()
    return LPResult(float(c @ res.x), res.x, res.iterations)
