import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from crowdstack import InvalidSpecError, simulate, solve_multiple_lps
from crowdstack import documents as docs
from crowdstack.cli import main
from crowdstack.reward_design import feasible_mu_region

from _factories import g0, random_spec

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
G0 = str(CONFIGS / "g0.json")
G0_FULL = str(CONFIGS / "g0_full.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_g0_config_matches_fixture():
    spec, _ = docs.load_config(G0)
    assert spec == g0()


@pytest.mark.parametrize("k, rows", [(1, 4), (2, 8), (3, 24)])
def test_enumerate_types(capsys, k, rows):
    code, doc, _ = run(capsys, "enumerate-types", "--tasks", str(k))
    assert code == 0
    assert doc["payload"]["count"] == rows == len(doc["payload"]["types"])
    assert [t["index"] for t in doc["payload"]["types"]] == list(range(rows))


def test_enumerate_types_capacity(capsys):
    code, doc, err = run(capsys, "enumerate-types", "--tasks", "8")
    assert code == 2 and doc is None
    assert "capacity" in err


def test_solve_methods(capsys):
    code, doc, _ = run(capsys, "solve", G0_FULL, "--method", "multilp")
    assert code == 0
    multilp = doc["payload"]
    assert multilp["lps_solved"] == 256
    assert multilp["leader_value"] >= 8.5 - 1e-9

    code, doc, _ = run(capsys, "solve", G0, "--method", "observed")
    assert (doc["payload"]["task"], doc["payload"]["value"]) == (1, 8.5)

    code, doc, _ = run(capsys, "solve", G0, "--method", "grid", "--grid", "1000")
    assert abs(doc["payload"]["value"] - multilp["leader_value"]) <= 0.01
    assert doc["input_digest"].startswith("sha256:")


def test_design_mu(capsys):
    code, doc, _ = run(capsys, "design-mu", G0)
    assert code == 0
    region = doc["payload"]["region"]
    assert (region["lower"], region["upper"], region["nonempty"]) == (-4.0, 4.0, True)
    assert len(doc["payload"]["per_type"]) == 2


def test_design_mu_degenerate(capsys):
    code, doc, err = run(capsys, "design-mu", str(CONFIGS / "degenerate.json"))
    assert code == 2 and doc is None
    assert "matched to both tasks" in err


def test_design_mu_empty(capsys):
    code, doc, _ = run(capsys, "design-mu", str(CONFIGS / "empty.json"))
    assert code == 0
    assert doc["payload"]["region"]["nonempty"] is False
    assert doc["payload"]["blocking_types"] == [1, 1]


def test_design_mu_needs_two_tasks(capsys, tmp_path):
    spec = random_spec(np.random.default_rng(2), n_tasks=3)
    path = tmp_path / "k3.json"
    path.write_text(json.dumps(docs.spec_to_dict(spec)))
    code, _, err = run(capsys, "design-mu", str(path))
    assert code == 2 and "two tasks" in err


@pytest.mark.parametrize("mu, exit_code, status", [("3", 0, "pass"), ("5", 1, "fail"), ("4", 1, "boundary")])
def test_verify_steering(capsys, mu, exit_code, status):
    code, doc, err = run(capsys, "verify-steering", G0, "--mu", mu)
    assert code == exit_code
    assert doc["payload"]["status"] == status
    if status == "boundary":
        assert "tie-breaking" in err
    if exit_code:
        assert doc["payload"]["violations"]


def test_simulate(capsys):
    code, doc, _ = run(capsys, "simulate", G0, "--sigma", "1,0", "--rounds", "100000", "--seed", "42")
    assert code == 0
    payload = doc["payload"]
    se = payload["leader_utility_std"] / np.sqrt(payload["rounds"])
    assert abs(payload["mean_leader_utility"] - 8.5) <= 3 * se
    code, doc, _ = run(capsys, "simulate", G0, "--from-solve", "--rounds", "100", "--seed", "1")
    assert code == 0 and doc["payload"]["sigma"] == [1.0, 0.0]


def test_simulate_bad_sigma(capsys):
    code, _, _ = run(capsys, "simulate", G0, "--sigma", "0.5,0.2", "--rounds", "10")
    assert code == 2
    code, _, _ = run(capsys, "simulate", G0, "--sigma", "1,0,0", "--rounds", "10")
    assert code == 2


def test_transform(capsys, tmp_path):
    out, fout = tmp_path / "l.tsv", tmp_path / "f.tsv"
    code, doc, _ = run(capsys, "transform", G0_FULL, "--out", str(out), "--follower-out", str(fout))
    assert code == 0
    assert doc["payload"]["shape"] == [2, 256]
    header = out.read_text().splitlines()[0].split("\t")
    assert header[0] == "action" and header[1:] == [str(j) for j in range(256)]
    assert len(fout.read_text().splitlines()) == 3


def test_invalid_config_lists_every_violation(capsys, tmp_path):
    doc = docs.spec_to_dict(g0())
    doc["prior"] = [0.25, 0.25]
    doc["params"]["kappa"][0][1] = 11.0
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, err = run(capsys, "solve", str(path))
    assert code == 2 and out is None
    assert "prior sums to 0.5" in err and "kappa exceeds psi" in err


def test_malformed_config(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"tasks": []}')
    code, _, err = run(capsys, "solve", str(path))
    assert code == 2
    for key in ("types", "prior", "matching", "params"):
        assert f"missing key '{key}'" in err
    path.write_text("{not json")
    assert run(capsys, "solve", str(path))[0] == 2
    assert run(capsys, "solve", str(tmp_path / "missing.json"))[0] == 2


def test_capacity_exit_code(capsys, tmp_path):
    doc = docs.spec_to_dict(g0())
    n = 24  # 2 * 2**24 cells > 10**7
    doc["types"] = [{"beta": 0.1, "preference_order": [1, 2]}] * n
    doc["prior"] = [1.0 / n] * n
    doc["matching"] = [[0] * n, [1] * n]
    doc["params"]["kappa"] = [[0.0] * n, [0.0] * n]
    path = tmp_path / "big.json"
    path.write_text(json.dumps(doc))
    code, out, err = run(capsys, "solve", str(path))
    assert code == 3 and out is None and "budget" in err


def test_config_enumerate_and_default_rule():
    doc = json.loads(Path(G0_FULL).read_text())
    spec = docs.spec_from_dict(doc)
    assert spec.n_types == 8 and spec.is_full_enumeration
    doc["matching"] = {"rule": "default", "threshold": 2}
    spec = docs.spec_from_dict(doc)
    assert [spec.matching(1, t) for t in range(8)] == [0, 0, 0, 0, 1, 1, 1, 1]
    assert [spec.matching(2, t) for t in range(8)] == [0] * 8
    doc["types"] = [{"beta_category": 2, "preference_order": [2, 1]}] + [
        {"beta": 0.9, "preference_order": [1, 2]}
    ] * 7
    spec = docs.spec_from_dict(doc)
    assert spec.worker_types[0].beta_category == 2 and spec.worker_types[1].beta_category == 4


@pytest.mark.parametrize("seed", range(50))
def test_spec_roundtrip(seed):
    spec = random_spec(np.random.default_rng(seed))
    text = json.dumps(docs.spec_to_dict(spec))
    again = docs.spec_from_dict(json.loads(text))
    assert again == spec
    assert json.dumps(docs.spec_to_dict(again)) == text


def test_config_files_roundtrip():
    for path in CONFIGS.glob("*.json"):
        try:
            spec, _ = docs.load_config(path)
        except InvalidSpecError:
            continue
        assert docs.spec_from_dict(json.loads(json.dumps(docs.spec_to_dict(spec)))) == spec


def test_payload_roundtrip_lossless():
    spec = random_spec(np.random.default_rng(8), n_tasks=2, n_types=3)
    result = solve_multiple_lps(spec)
    back = docs.solve_result_from_dict(json.loads(json.dumps(docs.solve_result_to_dict(result))))
    assert back == result
    report = simulate(spec, result.sigma, 1000, seed=4)
    assert docs.report_from_dict(json.loads(json.dumps(docs.report_to_dict(report)))) == report
    spec2 = random_spec(np.random.default_rng(8), n_tasks=2, n_types=1)
    if len(spec2.matching.matched_tasks(0)) == 1:
        region = feasible_mu_region(spec2)
        assert docs.interval_from_dict(json.loads(json.dumps(docs.interval_to_dict(region)))) == region


def test_console_entry_point_stdout_is_one_document():
    proc = subprocess.run(
        [sys.executable, "-m", "crowdstack.cli", "-v", "solve", G0],
        capture_output=True,
        text=True,
        check=True,
    )
    doc = json.loads(proc.stdout)
    assert set(doc) == {"command", "input_digest", "payload", "version"}
    assert "solved 4 LPs" in proc.stderr
