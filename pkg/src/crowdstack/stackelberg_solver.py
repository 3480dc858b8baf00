"""Optimal leader commitment via the Harsanyi transform and one LP per follower profile."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from crowdstack.best_response import MixedStrategy
from crowdstack.errors import CapacityError, InconsistencyError, UnsupportedShapeError
from crowdstack.game_model import GameSpec, ensure_valid
from crowdstack.lp_core import LinearProgram, LpStatus, solve_lp

logger = logging.getLogger(__name__)

DEFAULT_CELL_BUDGET = 10**7
# Later profiles replace the incumbent only if better by more than this.
PROFILE_TIE_TOL = 1e-9
TIE_TOL = 1e-9


@dataclass(frozen=True)
class FollowerProfile:
    """One follower pure strategy of the transformed game: task chosen per type.

    Profiles are numbered in mixed radix with type 0 as the least
    significant digit: ``index = sum((c(theta) - 1) * K**theta)``.
    """

    assignment: tuple[int, ...]
    n_tasks: int

    @classmethod
    def from_index(cls, index: int, n_tasks: int, n_types: int) -> FollowerProfile:
        if not 0 <= index < n_tasks**n_types:
            raise IndexError(f"profile index {index} outside 0..{n_tasks**n_types - 1}")
        digits = []
        for _ in range(n_types):
            index, d = divmod(index, n_tasks)
            digits.append(d + 1)
        return cls(tuple(digits), n_tasks)

    @property
    def index(self) -> int:
        return sum((c - 1) * self.n_tasks**theta for theta, c in enumerate(self.assignment))

    def __getitem__(self, theta: int) -> int:
        return self.assignment[theta]


@dataclass(frozen=True)
class NormalFormGame:
    """Prior-weighted payoffs, shape ``(K, K**n_types)``; row ``s - 1``, column = profile index."""

    leader_payoffs: np.ndarray
    follower_payoffs: np.ndarray
    n_tasks: int
    n_types: int

    @property
    def n_columns(self) -> int:
        return self.leader_payoffs.shape[1]

    def profile(self, column: int) -> FollowerProfile:
        return FollowerProfile.from_index(column, self.n_tasks, self.n_types)


@dataclass(frozen=True)
class SolveResult:
    sigma: MixedStrategy
    profile: FollowerProfile
    leader_value: float
    lps_solved: int
    lp_statuses: dict[str, int]


def _check_capacity(spec: GameSpec, max_cells: int) -> int:
    n_cols = spec.n_tasks**spec.n_types
    cells = spec.n_tasks * n_cols
    if cells > max_cells:
        raise CapacityError(
            f"transformed game has K * K^Theta = {spec.n_tasks} * {spec.n_tasks}^{spec.n_types} "
            f"= {cells} cells, budget is {max_cells}"
        )
    return n_cols


def harsanyi_transform(spec: GameSpec, max_cells: int = DEFAULT_CELL_BUDGET) -> NormalFormGame:
    ensure_valid(spec)
    n_cols = _check_capacity(spec, max_cells)
    K, T = spec.n_tasks, spec.n_types
    u, v = spec.payoff_tables()
    cols = np.arange(n_cols)
    leader = np.zeros((K, n_cols))
    follower = np.zeros((K, n_cols))
    # Accumulate theta-ascending so every cell is reproducible with a plain loop.
    for theta in range(T):
        chosen = (cols // K**theta) % K
        weight = spec.prior[theta]
        for s in range(K):
            leader[s] += weight * u[s, chosen, theta]
            follower[s] += weight * v[s, chosen, theta]
    leader.flags.writeable = False
    follower.flags.writeable = False
    return NormalFormGame(leader, follower, K, T)


def profile_lp(spec: GameSpec, profile: FollowerProfile, objective: np.ndarray) -> LinearProgram:
    """LP whose optimum is the best commitment inducing ``profile``.

    Each type must weakly prefer its assigned task to every alternative
    under sigma; constraints are kept per type rather than aggregated.
    """
    K = spec.n_tasks
    _, v = spec.payoff_tables()
    le = []
    for theta, c in enumerate(profile.assignment):
        for alt in range(1, K + 1):
            if alt != c:
                le.append((tuple(v[:, alt - 1, theta] - v[:, c - 1, theta]), 0.0))
    return LinearProgram(
        objective=tuple(objective),
        le_constraints=tuple(le),
        eq_constraints=(((1.0,) * K, 1.0),),
    )


def solve_multiple_lps(spec: GameSpec, max_cells: int = DEFAULT_CELL_BUDGET) -> SolveResult:
    """Solve one LP per follower profile and keep the best feasible optimum.

    Runs exactly ``K**n_types`` LPs; ties between profiles go to the
    smallest profile index.
    """
    game = harsanyi_transform(spec, max_cells)
    statuses: Counter = Counter()
    best = None
    for j in range(game.n_columns):
        profile = game.profile(j)
        outcome = solve_lp(profile_lp(spec, profile, game.leader_payoffs[:, j]))
        statuses[outcome.status.value] += 1
        if outcome.status is LpStatus.UNBOUNDED:
            raise InconsistencyError(f"LP for profile {j} is unbounded over the simplex")
        if outcome.optimal and (best is None or outcome.value > best[0] + PROFILE_TIE_TOL):
            best = (outcome.value, profile, outcome.x)
    lps_solved = sum(statuses.values())
    logger.info("solved %d LPs: %s", lps_solved, dict(statuses))
    if best is None:
        raise InconsistencyError("every profile LP was infeasible; some profile must be feasible")
    value, profile, x = best
    sigma = MixedStrategy(tuple(_project_to_simplex(x)))
    return SolveResult(
        sigma=sigma,
        profile=profile,
        leader_value=value,
        lps_solved=lps_solved,
        lp_statuses={k: statuses.get(k, 0) for k in (LpStatus.OPTIMAL.value, LpStatus.INFEASIBLE.value)},
    )


def _project_to_simplex(x: np.ndarray) -> list[float]:
    # Clears solver round-off (tiny negatives, sum off by ulps) only.
    x = np.clip(np.asarray(x, dtype=float), 0.0, None)
    return list(x / x.sum())


def lipschitz_bound(spec: GameSpec) -> float:
    """Bound on |d value / d sigma(1)| for any fixed profile when K = 2."""
    u, _ = spec.payoff_tables()
    diff = np.abs(u[0] - u[1])  # [c, theta]
    return float(sum(p * diff[:, theta].max() for theta, p in enumerate(spec.prior)))


def brute_force_commitment_value(spec: GameSpec, grid: int) -> float:
    """Best leader value over sigma(1) in {0, 1/grid, ..., 1} for two-task games.

    Each type best-responds to the mixed strategy itself (leader-favouring
    ties). Independent of the LP path; the result is a lower bound on the
    optimum and converges to it as the grid is refined.
    """
    if spec.n_tasks != 2:
        raise UnsupportedShapeError(f"grid oracle supports K = 2 only, got K = {spec.n_tasks}")
    if grid < 0:
        raise ValueError(f"grid must be >= 0, got {grid}")
    ensure_valid(spec)
    u, v = spec.payoff_tables()
    p = np.zeros(1) if grid == 0 else np.arange(grid + 1) / grid
    q = 1.0 - p
    total = np.zeros_like(p)
    for theta, weight in enumerate(spec.prior):
        worker = p[:, None] * v[0, :, theta] + q[:, None] * v[1, :, theta]
        leader = p[:, None] * u[0, :, theta] + q[:, None] * u[1, :, theta]
        ties = worker >= worker.max(axis=1, keepdims=True) - TIE_TOL
        picked = np.where(ties, leader, -np.inf).max(axis=1)
        total += weight * picked
    return float(total.max())


def write_matrix(matrix: np.ndarray, path: str | Path) -> None:
    """Tab-separated dump: header of profile indices, one row per leader action."""
    lines = ["action\t" + "\t".join(str(j) for j in range(matrix.shape[1]))]
    for s, row in enumerate(matrix, start=1):
        lines.append(f"{s}\t" + "\t".join(repr(float(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")
