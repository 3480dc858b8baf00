"""Tasks, worker types, matching and the one-shot utilities of both players.

Conventions used throughout the package:

* task ids are 1-based (``1..K``), matching how recommendations are written;
* worker type indices are 0-based positions in ``GameSpec.worker_types``;
* ``m(k, theta) == 0`` means task ``k`` *suits* type ``theta`` and ``1`` means
  it does not (the inverted convention is kept on purpose).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from crowdstack.errors import CapacityError, DomainError, InvalidSpecError

BETA_CATEGORIES = (1, 2, 3, 4)
# Closed upper edges of categories 1..3; category 4 takes the rest of [0, 1].
BETA_UPPER_EDGES = (0.25, 0.50, 0.75)
MAX_ENUMERATED_TASKS = 7
PRIOR_TOL = 1e-9


def beta_category(beta: float) -> int:
    """Map a cognitive atrophy rate in [0, 1] to its category 1..4.

    Upper edges are closed, so 0.25 -> 1 and 0.26 -> 2; values strictly
    between 0.25 and 0.26 fall in category 2.
    """
    if not isinstance(beta, (int, float)) or math.isnan(beta) or not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta!r}")
    for category, edge in enumerate(BETA_UPPER_EDGES, start=1):
        if beta <= edge:
            return category
    return 4


def representative_beta(category: int) -> float:
    """A beta value that maps back to ``category`` (its closed upper edge)."""
    if category not in BETA_CATEGORIES:
        raise DomainError(f"beta category must be one of 1..4, got {category!r}")
    return 0.25 * category


@dataclass(frozen=True)
class TaskType:
    id: int
    label: str = ""
    strenuous: bool = False
    deadline: float = 1.0
    completion_time: float = 1.0
    # Carried as metadata only; no utility depends on it.
    posted_reward: float = 0.0

    @property
    def on_time(self) -> bool:
        return self.completion_time <= self.deadline


@dataclass(frozen=True)
class WorkerType:
    beta_category: int
    preference_order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "preference_order", tuple(int(k) for k in self.preference_order))


@dataclass(frozen=True)
class MatchingTable:
    """Total map (task id, type index) -> {0, 1}, stored as rows per task."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(int(v) for v in row) for row in self.entries))

    def __call__(self, task: int, theta: int) -> int:
        if task < 1 or theta < 0:
            raise IndexError(f"no matching entry for task {task}, type {theta}")
        return self.entries[task - 1][theta]

    def matched_tasks(self, theta: int) -> list[int]:
        return [k for k, row in enumerate(self.entries, start=1) if row[theta] == 0]

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=int)


@dataclass(frozen=True)
class UtilityParams:
    """Rewards and costs. ``kappa`` is indexed ``[task - 1][type]``."""

    phi: tuple[float, ...]
    psi: tuple[float, ...]
    kappa: tuple[tuple[float, ...], ...]
    mu: float
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(x) for x in self.phi))
        object.__setattr__(self, "psi", tuple(float(x) for x in self.psi))
        object.__setattr__(self, "kappa", tuple(tuple(float(x) for x in row) for row in self.kappa))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "lam", float(self.lam))


@dataclass(frozen=True)
class GameSpec:
    tasks: tuple[TaskType, ...]
    worker_types: tuple[WorkerType, ...]
    prior: tuple[float, ...]
    matching: MatchingTable
    params: UtilityParams
    _tables: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "worker_types", tuple(self.worker_types))
        object.__setattr__(self, "prior", tuple(float(p) for p in self.prior))

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def n_types(self) -> int:
        return len(self.worker_types)

    @property
    def is_full_enumeration(self) -> bool:
        """True when the type list is exactly the canonical 4*K! enumeration."""
        if self.n_tasks > MAX_ENUMERATED_TASKS:
            return False
        return list(self.worker_types) == enumerate_worker_types(self.n_tasks)

    def with_mu(self, mu: float) -> GameSpec:
        return replace(self, params=replace(self.params, mu=mu))

    def payoff_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """System and worker utilities as arrays indexed ``[s - 1, c - 1, theta]``.

        Entries are produced by :func:`system_utility` and :func:`worker_utility`
        themselves, so vectorised consumers see identical values.
        """
        if "uv" not in self._tables:
            K, T = self.n_tasks, self.n_types
            u = np.empty((K, K, T))
            v = np.empty((K, K, T))
            for s in range(1, K + 1):
                for c in range(1, K + 1):
                    for theta in range(T):
                        u[s - 1, c - 1, theta] = system_utility(s, c, theta, self)
                        v[s - 1, c - 1, theta] = worker_utility(s, c, theta, self)
            u.flags.writeable = False
            v.flags.writeable = False
            self._tables["uv"] = (u, v)
        return self._tables["uv"]


def enumerate_worker_types(n_tasks: int) -> list[WorkerType]:
    """All ``4 * K!`` types, sorted by (beta category, preference order)."""
    if n_tasks < 1:
        raise DomainError(f"need at least one task, got {n_tasks}")
    if n_tasks > MAX_ENUMERATED_TASKS:
        raise CapacityError(
            f"enumerating types for K={n_tasks} tasks would give 4*{n_tasks}! = "
            f"{4 * math.factorial(n_tasks)} types; the limit is K <= {MAX_ENUMERATED_TASKS}"
        )
    orders = list(itertools.permutations(range(1, n_tasks + 1)))
    return [WorkerType(b, order) for b in BETA_CATEGORIES for order in orders]


def _check_ids(s: int, c: int, theta: int, spec: GameSpec) -> None:
    K = spec.n_tasks
    if not (1 <= s <= K and 1 <= c <= K):
        raise IndexError(f"task ids must be in 1..{K}, got s={s}, c={c}")
    if not 0 <= theta < spec.n_types:
        raise IndexError(f"type index must be in 0..{spec.n_types - 1}, got {theta}")


def system_utility(s: int, c: int, theta: int, spec: GameSpec) -> float:
    """Recommender's payoff when ``s`` was recommended and ``c`` completed."""
    _check_ids(s, c, theta, spec)
    if not spec.tasks[c - 1].on_time:
        return 0.0
    reward = spec.params.phi[c - 1]
    if c == s:
        return reward
    return reward - spec.params.lam


def worker_utility(s: int, c: int, theta: int, spec: GameSpec) -> float:
    """Worker's payoff; mismatch cost applies only when ``m(c, theta) == 1``."""
    _check_ids(s, c, theta, spec)
    if not spec.tasks[c - 1].on_time:
        return 0.0
    p = spec.params
    base = p.psi[c - 1] - p.kappa[c - 1][theta] * spec.matching(c, theta)
    if c == s:
        return base
    return base - p.mu


def default_matching(
    tasks: Sequence[TaskType], worker_types: Sequence[WorkerType], threshold: int
) -> MatchingTable:
    """Strenuous tasks suit types with category <= threshold; others suit all."""
    if threshold not in BETA_CATEGORIES:
        raise DomainError(f"threshold must be one of 1..4, got {threshold!r}")
    rows = []
    for task in tasks:
        if task.strenuous:
            rows.append(tuple(0 if wt.beta_category <= threshold else 1 for wt in worker_types))
        else:
            rows.append(tuple(0 for _ in worker_types))
    return MatchingTable(tuple(rows))


@dataclass(frozen=True)
class Violation:
    field: str
    constraint: str
    observed: str

    def __str__(self) -> str:
        return f"{self.field}: {self.observed} ({self.constraint})"


def validate(spec: GameSpec) -> list[Violation]:
    """Every invariant violation in ``spec``; empty means valid."""
    out: list[Violation] = []
    add = lambda f, c, o: out.append(Violation(f, c, o))  # noqa: E731

    K, T = spec.n_tasks, spec.n_types
    if K < 2:
        add("tasks", "K >= 2", f"K = {K}")
    ids = [t.id for t in spec.tasks]
    if ids != list(range(1, K + 1)):
        add("tasks", "ids must enumerate 1..K in order without duplicates", f"ids = {ids}")
    for t in spec.tasks:
        if not t.deadline > 0:
            add(f"tasks[{t.id}].deadline", "must be > 0", f"deadline = {t.deadline}")
        if not t.completion_time > 0:
            add(f"tasks[{t.id}].completion_time", "must be > 0", f"completion_time = {t.completion_time}")
        if not t.posted_reward >= 0:
            add(f"tasks[{t.id}].posted_reward", "must be >= 0", f"posted_reward = {t.posted_reward}")

    if T < 1:
        add("worker_types", "at least one type", "no types")
    for i, wt in enumerate(spec.worker_types):
        if wt.beta_category not in BETA_CATEGORIES:
            add(f"worker_types[{i}].beta_category", "must be in 1..4", f"beta_category = {wt.beta_category}")
        if sorted(wt.preference_order) != list(range(1, K + 1)):
            add(
                f"worker_types[{i}].preference_order",
                f"must be a permutation of 1..{K}",
                f"preference_order = {list(wt.preference_order)}",
            )

    if len(spec.prior) != T:
        add("prior", f"length must equal the number of types ({T})", f"length = {len(spec.prior)}")
    if any(not p >= 0 for p in spec.prior):
        add("prior", "entries must be >= 0", f"prior = {list(spec.prior)}")
    total = math.fsum(spec.prior)
    if abs(total - 1.0) > PRIOR_TOL:
        add("prior", f"must sum to 1 within {PRIOR_TOL:g}", f"prior sums to {total:g}")

    rows = spec.matching.entries
    matching_ok = len(rows) == K and all(len(r) == T for r in rows)
    if not matching_ok:
        add("matching", f"shape must be {K} x {T}", f"shape = {len(rows)} x {[len(r) for r in rows]}")
    elif any(v not in (0, 1) for r in rows for v in r):
        add("matching", "values must be 0 or 1", f"entries = {[list(r) for r in rows]}")

    p = spec.params
    if len(p.phi) != K:
        add("params.phi", f"length must be {K}", f"length = {len(p.phi)}")
    elif any(not x >= 0 for x in p.phi):
        add("params.phi", "entries must be >= 0", f"phi = {list(p.phi)}")
    psi_ok = len(p.psi) == K
    if not psi_ok:
        add("params.psi", f"length must be {K}", f"length = {len(p.psi)}")
    elif any(not x >= 0 for x in p.psi):
        add("params.psi", "entries must be >= 0", f"psi = {list(p.psi)}")
    if len(p.kappa) != K or any(len(r) != T for r in p.kappa):
        add("params.kappa", f"shape must be {K} x {T} ([task][type])", f"shape = {len(p.kappa)} rows")
    elif psi_ok:
        for k, row in enumerate(p.kappa, start=1):
            for theta, x in enumerate(row):
                if not x >= 0:
                    add("params.kappa", "entries must be >= 0", f"kappa({k},{theta}) = {x}")
                elif x > p.psi[k - 1]:
                    add(
                        "params.kappa",
                        "kappa(k, theta) <= psi(k)",
                        f"kappa exceeds psi for ({k},{theta}): {x} > {p.psi[k - 1]}",
                    )
    if not p.mu >= 0:
        add("params.mu", "must be >= 0", f"mu = {p.mu}")
    if not p.lam >= 0:
        add("params.lam", "must be >= 0", f"lambda = {p.lam}")
    return out


def ensure_valid(spec: GameSpec) -> GameSpec:
    violations = validate(spec)
    if violations:
        raise InvalidSpecError(violations)
    return spec
