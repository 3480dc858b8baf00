"""Follower best responses and the leader's expected utility."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from crowdstack.game_model import GameSpec, system_utility, worker_utility

SIGMA_TOL = 1e-9


@dataclass(frozen=True)
class BestResponse:
    chosen_task: int
    utility: float
    tie: bool


@dataclass(frozen=True)
class MixedStrategy:
    """Leader's distribution over recommendations; ``probs[s - 1]`` is for task ``s``."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if not probs:
            raise ValueError("mixed strategy needs at least one entry")
        if any(not p >= 0 for p in probs):
            raise ValueError(f"probabilities must be >= 0, got {list(probs)}")
        total = math.fsum(probs)
        if abs(total - 1.0) > SIGMA_TOL:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def pure(cls, task: int, n_tasks: int) -> MixedStrategy:
        if not 1 <= task <= n_tasks:
            raise IndexError(f"task id {task} outside 1..{n_tasks}")
        return cls(tuple(1.0 if k == task else 0.0 for k in range(1, n_tasks + 1)))

    def __len__(self) -> int:
        return len(self.probs)


def worker_best_response(s: int, theta: int, spec: GameSpec) -> BestResponse:
    """Best task for type ``theta`` after seeing recommendation ``s``.

    Ties go to the leader: among worker-optimal tasks pick the one with the
    highest system utility, then the smallest id.
    """
    best_c, best_v, best_u = 0, -math.inf, -math.inf
    n_max = 0
    for c in range(1, spec.n_tasks + 1):
        v = worker_utility(s, c, theta, spec)
        if v > best_v:
            best_c, best_v, best_u = c, v, system_utility(s, c, theta, spec)
            n_max = 1
        elif v == best_v:
            n_max += 1
            u = system_utility(s, c, theta, spec)
            if u > best_u:
                best_c, best_u = c, u
    return BestResponse(best_c, best_v, n_max > 1)


def best_response_table(spec: GameSpec) -> np.ndarray:
    """Chosen task ids, shape ``(K, n_types)``, indexed ``[s - 1, theta]``."""
    table = np.empty((spec.n_tasks, spec.n_types), dtype=int)
    for s in range(1, spec.n_tasks + 1):
        for theta in range(spec.n_types):
            table[s - 1, theta] = worker_best_response(s, theta, spec).chosen_task
    return table


def leader_expected_utility(sigma: MixedStrategy | Sequence[float], spec: GameSpec) -> float:
    """Prior-weighted leader payoff when each type answers the realised recommendation."""
    if not isinstance(sigma, MixedStrategy):
        sigma = MixedStrategy(tuple(sigma))
    if len(sigma) != spec.n_tasks:
        raise ValueError(f"sigma has {len(sigma)} entries for {spec.n_tasks} tasks")
    total = 0.0
    for theta, weight in enumerate(spec.prior):
        inner = 0.0
        for s, prob in enumerate(sigma.probs, start=1):
            c = worker_best_response(s, theta, spec).chosen_task
            inner += prob * system_utility(s, c, theta, spec)
        total += weight * inner
    return total


@dataclass(frozen=True)
class ObservedCommitment:
    task: int
    value: float


def optimal_observed_action_commitment(spec: GameSpec) -> ObservedCommitment:
    """Best pure recommendation when the worker reacts to the realised task.

    Expected utility is linear in sigma here, so a pure strategy is optimal.
    Ties go to the smallest task id.
    """
    best = None
    for s in range(1, spec.n_tasks + 1):
        value = leader_expected_utility(MixedStrategy.pure(s, spec.n_tasks), spec)
        if best is None or value > best.value:
            best = ObservedCommitment(s, value)
    return best


def mixed_best_response(
    sigma: Sequence[float], theta: int, spec: GameSpec, tol: float = 1e-9
) -> int:
    """Type ``theta``'s best task against the *distribution* ``sigma``.

    Used by the mixed-commitment oracle and checks. Actions within ``tol`` of
    the best worker value count as ties and are broken for the leader.
    """
    u, v = spec.payoff_tables()
    probs = np.asarray(sigma, dtype=float)
    worker_vals = probs @ v[:, :, theta]
    leader_vals = probs @ u[:, :, theta]
    candidates = worker_vals >= worker_vals.max() - tol
    return int(np.argmax(np.where(candidates, leader_vals, -np.inf))) + 1
