"""Disobedience-cost intervals that steer two-task workers to their matched task.

For a type with matched task A and unmatched task B, the worker keeps a
matched recommendation when ``mu > psi(B) - psi(A) - kappa(B)`` and abandons
an unmatched one for A when ``mu < psi(A) - psi(B) + kappa(B)``. Both bounds
are strict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from crowdstack.best_response import worker_best_response
from crowdstack.errors import DegenerateTypeError, UnsupportedShapeError
from crowdstack.game_model import GameSpec, ensure_valid

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class MuInterval:
    """Open interval ``(lower, upper)``.

    ``lower_type`` / ``upper_type`` name the type that set each bound; for an
    empty game-wide region they are the blocking pair.
    """

    lower: float
    upper: float
    lower_type: int | None = None
    upper_type: int | None = None

    @property
    def nonempty(self) -> bool:
        return self.lower < self.upper

    def contains(self, mu: float, margin: float = 0.0) -> bool:
        return self.lower + margin < mu < self.upper - margin


def _require_two_tasks(spec: GameSpec) -> None:
    if spec.n_tasks != 2:
        raise UnsupportedShapeError(
            f"reward bounds are derived for two tasks only, got K = {spec.n_tasks}"
        )


def matched_pair(theta: int, spec: GameSpec) -> tuple[int, int]:
    """(matched task, unmatched task) of a two-task type."""
    matched = spec.matching.matched_tasks(theta)
    if len(matched) != 1:
        what = "both tasks" if len(matched) == 2 else "neither task"
        raise DegenerateTypeError(f"type {theta} is matched to {what}; no steering bound applies")
    a = matched[0]
    return a, 3 - a


def mu_bounds_for_type(theta: int, spec: GameSpec) -> MuInterval:
    _require_two_tasks(spec)
    ensure_valid(spec)
    a, b = matched_pair(theta, spec)
    psi = spec.params.psi
    kappa_b = spec.params.kappa[b - 1][theta]
    lower = psi[b - 1] - psi[a - 1] - kappa_b
    upper = psi[a - 1] - psi[b - 1] + kappa_b
    return MuInterval(lower, upper, theta, theta)


def per_type_bounds(spec: GameSpec) -> dict[int, MuInterval]:
    """Bounds for every type with positive prior mass."""
    _require_two_tasks(spec)
    ensure_valid(spec)
    return {
        theta: mu_bounds_for_type(theta, spec)
        for theta, p in enumerate(spec.prior)
        if p > 0
    }


def feasible_mu_region(spec: GameSpec) -> MuInterval:
    """Intersection of the per-type intervals over types with positive prior."""
    bounds = per_type_bounds(spec)
    lower, upper = -math.inf, math.inf
    lower_type = upper_type = None
    for theta, iv in bounds.items():
        if iv.lower > lower:
            lower, lower_type = iv.lower, theta
        if iv.upper < upper:
            upper, upper_type = iv.upper, theta
    return MuInterval(lower, upper, lower_type, upper_type)


@dataclass(frozen=True)
class SteeringViolation:
    type_index: int
    recommended: int
    chosen: int


@dataclass(frozen=True)
class SteeringVerdict:
    mu: float
    violations: tuple[SteeringViolation, ...]
    # Types whose own bound equals mu: the outcome there rests on tie-breaking.
    boundary_types: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def status(self) -> str:
        if self.boundary_types:
            return "boundary"
        return "pass" if self.ok else "fail"


def verify_steering(spec: GameSpec, mu: float) -> SteeringVerdict:
    """Check by enumeration that every type picks a matched task under ``mu``.

    ``mu`` replaces the configured cost and is not required to be
    nonnegative, so what-if values below zero can be probed.
    """
    _require_two_tasks(spec)
    ensure_valid(spec)
    trial = spec.with_mu(mu)
    violations = []
    boundary = []
    for theta, p in enumerate(trial.prior):
        if p <= 0:
            continue
        for s in (1, 2):
            c = worker_best_response(s, theta, trial).chosen_task
            if trial.matching(c, theta) != 0:
                violations.append(SteeringViolation(theta, s, c))
        if len(trial.matching.matched_tasks(theta)) == 1:
            a, b = matched_pair(theta, trial)
            psi, kappa_b = trial.params.psi, trial.params.kappa[b - 1][theta]
            edges = (psi[b - 1] - psi[a - 1] - kappa_b, psi[a - 1] - psi[b - 1] + kappa_b)
            if any(math.isclose(mu, e, rel_tol=0.0, abs_tol=BOUNDARY_TOL) for e in edges):
                boundary.append(theta)
    return SteeringVerdict(float(mu), tuple(violations), tuple(boundary))
