import dataclasses
import itertools
import math

import pytest
from hypothesis import given, strategies as st

from crowdstack import (
    CapacityError,
    DomainError,
    MatchingTable,
    TaskType,
    UtilityParams,
    WorkerType,
    beta_category,
    default_matching,
    enumerate_worker_types,
    system_utility,
    validate,
    worker_utility,
)

from _factories import THETA_F, THETA_H, g0


@pytest.mark.parametrize(
    "beta, expected",
    [(0.0, 1), (0.10, 1), (0.25, 1), (0.26, 2), (0.255, 2), (0.50, 2), (0.51, 3), (0.75, 3), (0.76, 4), (1.0, 4)],
)
def test_beta_category_table(beta, expected):
    assert beta_category(beta) == expected


@pytest.mark.parametrize("beta", [-0.01, 1.01, float("nan")])
def test_beta_category_out_of_range(beta):
    with pytest.raises(DomainError, match=repr(beta)):
        beta_category(beta)


@given(st.floats(0, 1), st.floats(0, 1))
def test_beta_category_monotone(a, b):
    lo, hi = sorted((a, b))
    assert beta_category(lo) <= beta_category(hi)


@pytest.mark.parametrize("k, count", [(1, 4), (2, 8), (3, 24), (4, 96)])
def test_enumerate_counts(k, count):
    types = enumerate_worker_types(k)
    assert len(types) == count == 4 * math.factorial(k)
    keys = [(t.beta_category, t.preference_order) for t in types]
    assert len(set(keys)) == count
    assert keys == sorted(keys)


def test_enumerate_order_k2():
    assert [(t.beta_category, t.preference_order) for t in enumerate_worker_types(2)] == [
        (b, order) for b in (1, 2, 3, 4) for order in ((1, 2), (2, 1))
    ]


def test_enumerate_limits():
    with pytest.raises(CapacityError):
        enumerate_worker_types(8)
    with pytest.raises(DomainError):
        enumerate_worker_types(0)


def test_system_utility_examples():
    spec = g0()
    assert system_utility(1, 1, THETA_F, spec) == 12.0
    assert system_utility(1, 2, THETA_F, spec) == 5.0
    assert system_utility(1, 1, THETA_F, g0(late_task=1)) == 0.0


def test_worker_utility_examples():
    spec = g0()
    assert worker_utility(2, 2, THETA_F, spec) == 6.0
    assert worker_utility(2, 1, THETA_F, spec) == -1.0
    assert worker_utility(1, 2, THETA_F, spec) == 3.0
    assert worker_utility(1, 1, THETA_H, spec) == 10.0


def test_utilities_reject_bad_ids():
    spec = g0()
    for args in [(0, 1, 0), (1, 3, 0), (1, 1, 2), (1, 1, -1)]:
        with pytest.raises(IndexError):
            system_utility(*args, spec)
        with pytest.raises(IndexError):
            worker_utility(*args, spec)


def test_default_matching():
    tasks = [TaskType(1, "mod", True), TaskType(2, "label", False)]
    types = [WorkerType(c, (1, 2)) for c in (1, 2, 3, 4)]
    table = default_matching(tasks, types, threshold=2)
    assert table(1, 0) == 0
    assert table(1, 3) == 1
    assert [table(2, t) for t in range(4)] == [0, 0, 0, 0]
    assert [table(1, t) for t in range(4)] == [0, 0, 1, 1]
    with pytest.raises(DomainError):
        default_matching(tasks, types, threshold=5)


def test_validate_g0_clean():
    assert validate(g0()) == []


def test_validate_prior_scaled():
    spec = dataclasses.replace(g0(), prior=(0.25, 0.25))
    msgs = [str(v) for v in validate(spec)]
    assert len(msgs) == 1
    assert "prior sums to 0.5" in msgs[0]


def test_validate_kappa_ceiling():
    spec = g0(kappa_f=11.0)
    msgs = [str(v) for v in validate(spec)]
    assert len(msgs) == 1
    assert "kappa exceeds psi for (1,1)" in msgs[0]


def test_validate_collects_everything():
    spec = dataclasses.replace(
        g0(),
        tasks=(TaskType(1, deadline=0.0), TaskType(3, completion_time=-1.0)),
        worker_types=(WorkerType(5, (1, 1)), WorkerType(1, (1, 2))),
        prior=(1.5, -0.5, 0.0),
        matching=MatchingTable(((0, 2), (1, 0))),
        params=UtilityParams(phi=(1.0,), psi=(1.0, -1.0), kappa=((0.0, 0.0),), mu=-1.0, lam=-1.0),
    )
    fields = {v.field for v in validate(spec)}
    for expected in [
        "tasks",
        "tasks[1].deadline",
        "tasks[3].completion_time",
        "worker_types[0].beta_category",
        "worker_types[0].preference_order",
        "prior",
        "matching",
        "params.phi",
        "params.psi",
        "params.kappa",
        "params.mu",
        "params.lam",
    ]:
        assert expected in fields


def test_restricted_type_list_flagged():
    assert not g0().is_full_enumeration
    spec = dataclasses.replace(
        g0(),
        worker_types=tuple(enumerate_worker_types(2)),
        prior=(0.125,) * 8,
        matching=MatchingTable(((0,) * 8, (1,) * 8)),
        params=UtilityParams((1.0, 1.0), (1.0, 1.0), ((0.0,) * 8, (0.0,) * 8), 0.0, 0.0),
    )
    assert validate(spec) == []
    assert spec.is_full_enumeration


def test_payoff_tables_match_scalar_functions():
    spec = g0()
    u, v = spec.payoff_tables()
    for s, c, theta in itertools.product((1, 2), (1, 2), (0, 1)):
        assert u[s - 1, c - 1, theta] == system_utility(s, c, theta, spec)
        assert v[s - 1, c - 1, theta] == worker_utility(s, c, theta, spec)
    assert not u.flags.writeable


def test_with_mu_resets_cached_tables():
    spec = g0()
    spec.payoff_tables()
    other = spec.with_mu(0.5)
    assert other.payoff_tables()[1][0, 1, THETA_F] == 6.0 - 0.5
