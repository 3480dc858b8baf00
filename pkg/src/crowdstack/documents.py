"""JSON game configs and result documents.

Config schema (all keys required unless noted)::

    {
      "tasks":  [{"id", "label", "strenuous", "deadline", "completion_time", "posted_reward"}],
      "types":  "enumerate" | [{"beta" | "beta_category", "preference_order"}],
      "prior":  [float, ...],
      "matching": {"rule": "default", "threshold": 1..4} | [[0|1, ...] per task],
      "params": {"phi": [...], "psi": [...], "kappa": [[...] per task], "mu": float, "lambda": float}
    }

Floats are written with ``repr`` so every value survives a round trip.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from crowdstack import __version__
from crowdstack.best_response import MixedStrategy
from crowdstack.errors import CapacityError, DomainError, InvalidSpecError
from crowdstack.game_model import (
    GameSpec,
    MatchingTable,
    TaskType,
    UtilityParams,
    WorkerType,
    beta_category,
    default_matching,
    enumerate_worker_types,
    ensure_valid,
    representative_beta,
)
from crowdstack.reward_design import MuInterval, SteeringVerdict
from crowdstack.simulation import SimulationReport
from crowdstack.stackelberg_solver import FollowerProfile, SolveResult


def _require(doc: dict, key: str, where: str, problems: list[str]):
    if not isinstance(doc, dict) or key not in doc:
        problems.append(f"{where}: missing key '{key}'")
        return None
    return doc[key]


def spec_from_dict(doc: dict) -> GameSpec:
    """Build and validate a GameSpec; every problem found is reported at once."""
    problems: list[str] = []
    if not isinstance(doc, dict):
        raise InvalidSpecError(["config: top level must be a JSON object"])

    tasks = []
    for i, t in enumerate(_require(doc, "tasks", "config", problems) or []):
        try:
            tasks.append(
                TaskType(
                    id=int(t["id"]),
                    label=str(t.get("label", "")),
                    strenuous=bool(t.get("strenuous", False)),
                    deadline=float(t["deadline"]),
                    completion_time=float(t["completion_time"]),
                    posted_reward=float(t.get("posted_reward", 0.0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"tasks[{i}]: malformed entry ({exc!r})")

    types_doc = _require(doc, "types", "config", problems)
    worker_types: list[WorkerType] = []
    if types_doc == "enumerate":
        try:
            worker_types = enumerate_worker_types(len(tasks))
        except (CapacityError, DomainError) as exc:
            problems.append(f"types: cannot enumerate ({exc})")
    elif isinstance(types_doc, list):
        for i, wt in enumerate(types_doc):
            try:
                if "beta_category" in wt:
                    cat = int(wt["beta_category"])
                else:
                    cat = beta_category(float(wt["beta"]))
                worker_types.append(WorkerType(cat, tuple(wt["preference_order"])))
            except (KeyError, TypeError, ValueError, DomainError) as exc:
                problems.append(f"types[{i}]: malformed entry ({exc})")
    elif types_doc is not None:
        problems.append("types: must be \"enumerate\" or a list of types")

    prior = _require(doc, "prior", "config", problems)
    if prior is not None and not isinstance(prior, list):
        problems.append("prior: must be a list of numbers")
        prior = None

    matching_doc = _require(doc, "matching", "config", problems)
    matching = None
    if isinstance(matching_doc, dict):
        if matching_doc.get("rule") != "default":
            problems.append(f"matching: unknown rule {matching_doc.get('rule')!r}")
        else:
            try:
                matching = default_matching(tasks, worker_types, int(matching_doc.get("threshold", 0)))
            except (DomainError, TypeError, ValueError) as exc:
                problems.append(f"matching: {exc}")
    elif isinstance(matching_doc, list):
        matching = MatchingTable(tuple(tuple(row) for row in matching_doc))
    elif matching_doc is not None:
        problems.append("matching: must be a rule object or a 2-D array")

    params_doc = _require(doc, "params", "config", problems)
    params = None
    if params_doc is not None:
        try:
            params = UtilityParams(
                phi=tuple(params_doc["phi"]),
                psi=tuple(params_doc["psi"]),
                kappa=tuple(tuple(row) for row in params_doc["kappa"]),
                mu=params_doc["mu"],
                lam=params_doc["lambda"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"params: malformed ({exc!r})")

    if problems:
        raise InvalidSpecError(problems)
    return ensure_valid(GameSpec(tuple(tasks), tuple(worker_types), tuple(prior), matching, params))


def spec_to_dict(spec: GameSpec) -> dict:
    return {
        "tasks": [
            {
                "id": t.id,
                "label": t.label,
                "strenuous": t.strenuous,
                "deadline": t.deadline,
                "completion_time": t.completion_time,
                "posted_reward": t.posted_reward,
            }
            for t in spec.tasks
        ],
        "types": [
            {"beta": representative_beta(wt.beta_category), "preference_order": list(wt.preference_order)}
            for wt in spec.worker_types
        ],
        "prior": list(spec.prior),
        "matching": [list(row) for row in spec.matching.entries],
        "params": {
            "phi": list(spec.params.phi),
            "psi": list(spec.params.psi),
            "kappa": [list(row) for row in spec.params.kappa],
            "mu": spec.params.mu,
            "lambda": spec.params.lam,
        },
    }


def load_config(path: str | Path) -> tuple[GameSpec, bytes]:
    """Parse a config file; returns the GameSpec and the raw bytes for digesting."""
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InvalidSpecError([f"config: not valid JSON ({exc})"]) from exc
    return spec_from_dict(doc), raw


def digest(raw: bytes) -> str:
    return "sha256:" + hashlib.sha256(raw).hexdigest()


# -- payloads -----------------------------------------------------------------


def solve_result_to_dict(result: SolveResult) -> dict:
    return {
        "sigma": list(result.sigma.probs),
        "profile": {"index": result.profile.index, "assignment": list(result.profile.assignment)},
        "leader_value": result.leader_value,
        "lps_solved": result.lps_solved,
        "lp_statuses": dict(result.lp_statuses),
    }


def solve_result_from_dict(doc: dict) -> SolveResult:
    sigma = MixedStrategy(tuple(doc["sigma"]))
    profile = FollowerProfile(tuple(doc["profile"]["assignment"]), len(sigma))
    return SolveResult(sigma, profile, doc["leader_value"], doc["lps_solved"], dict(doc["lp_statuses"]))


def interval_to_dict(iv: MuInterval) -> dict:
    return {
        "lower": iv.lower,
        "upper": iv.upper,
        "nonempty": iv.nonempty,
        "lower_type": iv.lower_type,
        "upper_type": iv.upper_type,
    }


def interval_from_dict(doc: dict) -> MuInterval:
    return MuInterval(doc["lower"], doc["upper"], doc["lower_type"], doc["upper_type"])


def verdict_to_dict(verdict: SteeringVerdict) -> dict:
    return {
        "mu": verdict.mu,
        "status": verdict.status,
        "violations": [
            {"type": v.type_index, "recommended": v.recommended, "chosen": v.chosen}
            for v in verdict.violations
        ],
        "boundary_types": list(verdict.boundary_types),
    }


def report_to_dict(report: SimulationReport) -> dict:
    return {
        "rounds": report.rounds,
        "mean_leader_utility": report.mean_leader_utility,
        "mean_worker_utility": report.mean_worker_utility,
        "leader_utility_std": report.leader_utility_std,
        "obedience_rate": report.obedience_rate,
        "match_rate": report.match_rate,
        "per_type_counts": list(report.per_type_counts),
        "seed": report.seed,
        "generator": report.generator,
    }


def report_from_dict(doc: dict) -> SimulationReport:
    fields = dict(doc)
    fields["per_type_counts"] = tuple(fields["per_type_counts"])
    return SimulationReport(**fields)


def result_document(command: dict, raw_config: bytes | None, payload: Any) -> dict:
    return {
        "command": command,
        "input_digest": digest(raw_config) if raw_config is not None else None,
        "payload": payload,
        "version": __version__,
    }


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)
