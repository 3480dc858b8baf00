"""Dense two-phase primal simplex with Bland's rule.

Solves ``maximize c.x  s.t.  A_le x <= b_le,  A_eq x = b_eq,  x >= 0``.
Instances in this package have a handful of variables, so the tableau is
kept dense and reduced costs are recomputed every iteration.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from crowdstack.errors import InconsistencyError

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
# Entering test on reduced costs; kept at pivot scale so returned optima are tight.
OPT_TOL = 1e-9
MAX_PIVOTS = 100_000


class LpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple[float, ...]
    le_constraints: tuple[tuple[tuple[float, ...], float], ...] = ()
    eq_constraints: tuple[tuple[tuple[float, ...], float], ...] = ()

    def __post_init__(self):
        n = len(self.objective)
        object.__setattr__(self, "objective", tuple(float(x) for x in self.objective))
        for name in ("le_constraints", "eq_constraints"):
            rows = []
            for i, (coeffs, bound) in enumerate(getattr(self, name)):
                coeffs = tuple(float(x) for x in coeffs)
                if len(coeffs) != n:
                    raise ValueError(
                        f"{name}[{i}] has {len(coeffs)} coefficients, objective has {n}"
                    )
                rows.append((coeffs, float(bound)))
            object.__setattr__(self, name, tuple(rows))

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @property
    def n_constraints(self) -> int:
        return len(self.le_constraints) + len(self.eq_constraints)


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    x: np.ndarray | None = None
    value: float | None = None
    pivots: int = field(default=0, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    def __init__(self, rows: np.ndarray, basis: list[int], verbose: bool):
        self.t = rows
        self.basis = basis
        self.verbose = verbose
        self.pivots = 0

    def pivot(self, row: int, col: int) -> None:
        t = self.t
        t[row] /= t[row, col]
        for i in range(t.shape[0]):
            if i != row and t[i, col] != 0.0:
                t[i] -= t[i, col] * t[row]
        self.basis[row] = col
        self.pivots += 1
        if self.pivots > MAX_PIVOTS:
            raise InconsistencyError("simplex exceeded the pivot budget despite Bland's rule")
        if self.verbose:
            logger.debug("pivot %d on (row %d, col %d)\n%s", self.pivots, row, col, t)

    def run(self, cost: np.ndarray, allowed: np.ndarray) -> bool:
        """Maximise ``cost`` over the current basis. False means unbounded."""
        t = self.t
        while True:
            reduced = cost - cost[self.basis] @ t[:, :-1]
            entering = np.flatnonzero(allowed & (reduced > OPT_TOL))
            if entering.size == 0:
                return True
            col = int(entering[0])
            column = t[:, col]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                return False
            ratios = t[rows, -1] / column[rows]
            best = ratios.min()
            tied = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
            row = int(min(tied, key=lambda i: self.basis[i]))
            self.pivot(row, col)


def solve_lp(lp: LinearProgram, verbose: bool = False) -> LpOutcome:
    """Solve ``lp`` and classify it as Optimal, Infeasible or Unbounded."""
    n = lp.n_vars
    m_le = len(lp.le_constraints)
    rows = list(lp.le_constraints) + list(lp.eq_constraints)
    m = len(rows)

    # Columns: structural | slacks (one per <= row) | artificials (as needed).
    needs_art = []
    body = np.zeros((m, n + m_le))
    rhs = np.zeros(m)
    for i, (coeffs, bound) in enumerate(rows):
        body[i, :n] = coeffs
        if i < m_le:
            body[i, n + i] = 1.0
        rhs[i] = bound
        if bound < 0:
            body[i] *= -1.0
            rhs[i] = -bound
        if i >= m_le or bound < 0:
            needs_art.append(i)

    n_art = len(needs_art)
    width = n + m_le + n_art
    t = np.zeros((m, width + 1))
    t[:, : n + m_le] = body
    t[:, -1] = rhs
    basis = [n + i for i in range(m)]  # placeholder for slack-basic rows
    for j, i in enumerate(needs_art):
        t[i, n + m_le + j] = 1.0
        basis[i] = n + m_le + j
    tab = _Tableau(t, basis, verbose)
    if verbose:
        logger.debug("initial tableau (basis %s)\n%s", basis, t)

    is_art = np.zeros(width, dtype=bool)
    is_art[n + m_le :] = True

    if n_art:
        phase1 = np.where(is_art, -1.0, 0.0)
        tab.run(phase1, np.ones(width, dtype=bool))
        infeasibility = -float(phase1[tab.basis] @ tab.t[:, -1])
        if infeasibility > FEAS_TOL:
            return LpOutcome(LpStatus.INFEASIBLE, pivots=tab.pivots)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        keep = []
        for i in range(tab.t.shape[0]):
            if is_art[tab.basis[i]]:
                candidates = np.flatnonzero(~is_art & (np.abs(tab.t[i, :-1]) > PIVOT_TOL))
                if candidates.size == 0:
                    continue
                tab.pivot(i, int(candidates[0]))
            keep.append(i)
        tab.t = tab.t[keep]
        tab.basis = [tab.basis[i] for i in keep]

    cost = np.zeros(width)
    cost[:n] = lp.objective
    if not tab.run(cost, ~is_art):
        return LpOutcome(LpStatus.UNBOUNDED, pivots=tab.pivots)

    x = np.zeros(n)
    for i, var in enumerate(tab.basis):
        if var < n:
            x[var] = tab.t[i, -1]
    value = float(np.dot(lp.objective, x))
    return LpOutcome(LpStatus.OPTIMAL, x, value, tab.pivots)


def max_violation(lp: LinearProgram, x: Sequence[float]) -> float:
    """Largest constraint or sign violation of ``x`` (0.0 when feasible)."""
    x = np.asarray(x, dtype=float)
    worst = max(0.0, float(-x.min())) if x.size else 0.0
    for coeffs, bound in lp.le_constraints:
        worst = max(worst, float(np.dot(coeffs, x)) - bound)
    for coeffs, bound in lp.eq_constraints:
        worst = max(worst, abs(float(np.dot(coeffs, x)) - bound))
    return worst
