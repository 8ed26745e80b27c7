"""Phase-1 simplex for small linear feasibility problems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, LpUnbounded

FEAS_TOL = 1e-9
_PIVOT_TOL = 1e-11


@dataclass
class LpProblem:
    """Feasibility system ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``lo <= x <= hi``.

    Bounds default to ``(0, None)``; ``None`` means unbounded on that side.
    """

    num_vars: int
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    bounds: Sequence[tuple[float | None, float | None]] | None = None

    def __post_init__(self) -> None:
        n = self.num_vars
        self.A_ub = np.zeros((0, n)) if self.A_ub is None else np.atleast_2d(np.asarray(self.A_ub, dtype=float))
        self.b_ub = np.zeros(0) if self.b_ub is None else np.asarray(self.b_ub, dtype=float).ravel()
        self.A_eq = np.zeros((0, n)) if self.A_eq is None else np.atleast_2d(np.asarray(self.A_eq, dtype=float))
        self.b_eq = np.zeros(0) if self.b_eq is None else np.asarray(self.b_eq, dtype=float).ravel()
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        if (
            self.A_ub.shape != (len(self.b_ub), n)
            or self.A_eq.shape != (len(self.b_eq), n)
            or len(self.bounds) != n
        ):
            raise DimensionMismatch("LP rows are not dimension-consistent")
        for arr in (self.A_ub, self.b_ub, self.A_eq, self.b_eq):
            if not np.all(np.isfinite(arr)):
                raise DimensionMismatch("LP coefficients must be finite")

    def violation(self, x: np.ndarray) -> float:
        """Largest constraint violation of ``x``."""
        v = [0.0]
        if len(self.b_ub):
            v.append(float(np.max(self.A_ub @ x - self.b_ub)))
        if len(self.b_eq):
            v.append(float(np.max(np.abs(self.A_eq @ x - self.b_eq))))
        for xj, (lo, hi) in zip(x, self.bounds):
            if lo is not None:
                v.append(lo - xj)
            if hi is not None:
                v.append(xj - hi)
        return max(v)


@dataclass(frozen=True)
class LpResult:
    feasible: bool
    x: np.ndarray | None
    phase1_value: float
    pivots: int = 0


def _phase1(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float, int]:
    """Minimize the sum of artificials for ``A y = b, y >= 0`` (b >= 0) with Bland's rule."""
    m, N = A.shape
    T = np.zeros((m + 1, N + m + 1))
    T[:m, :N] = A
    T[:m, N : N + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :N] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(N, N + m))
    pivots = 0
    while True:
        cost = T[m, :-1]
        entering = np.flatnonzero(cost < -_PIVOT_TOL)
        if entering.size == 0:
            break
        j = int(entering[0])
        col = T[:m, j]
        rows = np.flatnonzero(col > _PIVOT_TOL)
        if rows.size == 0:
            raise LpUnbounded("phase-1 program reported unbounded")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-14 * max(1.0, abs(best))]
        r = int(min(ties, key=lambda k: basis[k]))
        T[r] /= T[r, j]
        for k in range(m + 1):
            if k != r and T[k, j] != 0.0:
                T[k] -= T[k, j] * T[r]
        basis[r] = j
        pivots += 1
    y = np.zeros(N + m)
    for k, var in enumerate(basis):
        y[var] = T[k, -1]
    return y[:N], float(-T[m, -1]), pivots


def lp_feasibility(problem: LpProblem) -> LpResult:
    """Find a point satisfying ``problem`` or report infeasibility.

    Bounds are substituted away (shift for finite lower bounds, reflection for
    upper-only bounds, split for free variables), inequality rows get slacks
    and phase 1 of the tableau simplex minimizes the artificial sum.  The
    system is declared infeasible only when that minimum exceeds 1e-9.
    """
    n = problem.num_vars
    cols: list[tuple[int, float]] = []  # (original variable, sign) per new variable
    offset = np.zeros(n)
    extra_ub: list[tuple[int, float]] = []  # (new variable, upper bound)
    for j, (lo, hi) in enumerate(problem.bounds):
        if lo is not None:
            offset[j] = lo
            cols.append((j, 1.0))
            if hi is not None:
                extra_ub.append((len(cols) - 1, hi - lo))
        elif hi is not None:
            offset[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    K = len(cols)
    T = np.zeros((n, K))
    for k, (j, sgn) in enumerate(cols):
        T[j, k] = sgn

    ub_A = problem.A_ub @ T
    ub_b = problem.b_ub - problem.A_ub @ offset
    if extra_ub:
        rows = np.zeros((len(extra_ub), K))
        for r, (k, h) in enumerate(extra_ub):
            rows[r, k] = 1.0
        ub_A = np.vstack([ub_A, rows])
        ub_b = np.concatenate([ub_b, [h for _, h in extra_ub]])
    eq_A = problem.A_eq @ T
    eq_b = problem.b_eq - problem.A_eq @ offset

    m_ub, m_eq = len(ub_b), len(eq_b)
    A = np.zeros((m_ub + m_eq, K + m_ub))
    A[:m_ub, :K] = ub_A
    A[:m_ub, K:] = np.eye(m_ub)
    A[m_ub:, :K] = eq_A
    b = np.concatenate([ub_b, eq_b])
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    if A.shape[0] == 0:
        y = np.zeros(K)
        value, pivots = 0.0, 0
    else:
        y_full, value, pivots = _phase1(A, b)
        y = y_full[:K]
    if value > FEAS_TOL:
        return LpResult(False, None, value, pivots)
    x = T @ y + offset
    if problem.violation(x) > FEAS_TOL:
        return LpResult(False, None, max(value, problem.violation(x)), pivots)
    return LpResult(True, x, value, pivots)
