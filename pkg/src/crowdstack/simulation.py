"""Monte Carlo replay of one-shot rounds against a fixed commitment."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from crowdstack.best_response import MixedStrategy, best_response_table
from crowdstack.game_model import GameSpec, ensure_valid

GENERATOR = "numpy.random.PCG64"


@dataclass(frozen=True)
class SimulationReport:
    rounds: int
    mean_leader_utility: float
    mean_worker_utility: float
    leader_utility_std: float
    obedience_rate: float
    match_rate: float
    per_type_counts: tuple[int, ...]
    seed: int
    generator: str = GENERATOR

    @property
    def leader_standard_error(self) -> float:
        return self.leader_utility_std / np.sqrt(self.rounds)


def simulate(
    spec: GameSpec, sigma: MixedStrategy | Sequence[float], rounds: int, seed: int
) -> SimulationReport:
    """Draw ``rounds`` independent (type, recommendation) pairs and replay best responses.

    Types come from the prior and recommendations from ``sigma``, both via
    one PCG64 stream seeded with ``seed``; the same inputs always give the
    same report.
    """
    ensure_valid(spec)
    if not isinstance(sigma, MixedStrategy):
        sigma = MixedStrategy(tuple(sigma))
    if len(sigma) != spec.n_tasks:
        raise ValueError(f"sigma has {len(sigma)} entries for {spec.n_tasks} tasks")
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")

    rng = np.random.Generator(np.random.PCG64(seed))
    thetas = rng.choice(spec.n_types, size=rounds, p=np.asarray(spec.prior))
    recs = rng.choice(spec.n_tasks, size=rounds, p=np.asarray(sigma.probs))

    u, v = spec.payoff_tables()
    chosen = best_response_table(spec)[recs, thetas] - 1
    leader = u[recs, chosen, thetas]
    worker = v[recs, chosen, thetas]
    matching = spec.matching.as_array()

    return SimulationReport(
        rounds=rounds,
        mean_leader_utility=float(leader.mean()),
        mean_worker_utility=float(worker.mean()),
        leader_utility_std=float(leader.std(ddof=1)) if rounds > 1 else 0.0,
        obedience_rate=float(np.mean(chosen == recs)),
        match_rate=float(np.mean(matching[chosen, thetas] == 0)),
        per_type_counts=tuple(int(n) for n in np.bincount(thetas, minlength=spec.n_types)),
        seed=seed,
    )
