"""Acceptance criteria 1-9.

Each ``test_criterion_<k>_*`` asserts the thresholds of criterion ``k`` on
the report of the matching suite in ``acceptance_suites``; the terminal
summary prints one PASS/FAIL line per criterion.  Run just these with
``pytest -m acceptance``.
"""
import json

import pytest

import acceptance_suites as suites

pytestmark = pytest.mark.acceptance

NON_MEMBERS = {"power(p=2.5)", "power(p=3)", "power(p=4)"}

_reports = {}


def report(k):
    if k not in _reports:
        _reports[k] = suites.dumps(suites.SUITES[k]())
    return json.loads(_reports[k])


def test_criterion_1_membership():
    doc = report(1)
    assert doc["tol"] == 1e-8 and doc["trials"] == 200
    labels = {r["label"] for r in doc["reports"]}
    assert {"xlogx", "power(p=1.25)", "power(p=1.5)", "power(p=1.75)", "power(p=2)"} <= labels
    assert {r["n"] for r in doc["reports"]} == {2, 3, 4}
    failing = [(r["label"], r["n"]) for r in doc["reports"] if r["status"] not in ("member", "affine")]
    assert not failing, failing
    for r in doc["reports"]:
        assert len(r["verdicts"]) == 4
        for v in r["verdicts"]:
            assert v["passed"] and v["worst_relative_gap"] >= -1e-8


def test_criterion_2_equivalence():
    doc = report(2)
    for run in doc["runs"]:
        assert run["specs"] >= 30
        assert not run["disagreements"], (run["seed"], run["disagreements"])
        for label, status, _ in run["statuses"]:
            expected = ("violation",) if label in NON_MEMBERS else ("member", "affine")
            assert status in expected, (run["seed"], label, status)


def test_criterion_3_non_members():
    doc = report(3)
    assert doc["budget"] == 10_000 and doc["n_max"] == 2
    for row in doc["results"]:
        found = row["found"]
        assert found is not None, row["p"]
        assert found["n"] <= 2 and found["evaluations"] <= 10_000
        assert found["gap"] < -1e-6
        assert row["matches_archive"]
        assert row["archived_replay_error"] <= 1e-12
        assert row["checker_witness_gap"] < -1e-6 and row["checker_replay_error"] <= 1e-12


def test_criterion_4_calculus_oracles():
    doc = report(4)
    assert len(doc["rows"]) == 100 and doc["eps"] == 1e-5
    assert doc["max_fd_rel"] < 1e-6
    assert doc["max_inverse_err"] < 1e-10
    assert doc["max_trace_residual"] < 1e-7


def test_criterion_5_bivariate_identities():
    doc = report(5)
    assert len(doc["rows"]) == 100
    assert doc["max_inverse_residual"] < 1e-10
    assert doc["max_block_residual"] < 1e-10


def test_criterion_6_hermite():
    doc = report(6)
    assert doc["max_scalar_residual"] < 1e-8
    assert doc["max_matrix_residual"] < 1e-7


def test_criterion_7_canonical_form():
    doc = report(7)
    assert doc["max_second_diff_rel"] < 1e-6
    assert len(doc["identities"]) == 50 and all(doc["identities"])
    assert all(z["stabilized"] and z["within_bound"] for z in doc["zero_limits"])


def test_criterion_8_entropy():
    doc = report(8)
    for label, row in doc["per_spec"].items():
        assert row["min_relative_entropy"] >= -1e-10, label
        assert row["max_unitary_residual"] < 1e-10, label
    assert doc["max_deterministic"] < 1e-12
    assert doc["max_affine"] < 1e-12
    assert doc["max_scalar_residual"] < 1e-12


@pytest.mark.parametrize("k", sorted(suites.SUITES))
def test_criterion_9_reproducible(k):
    first = _reports.get(k) or suites.dumps(suites.SUITES[k]())
    assert suites.dumps(suites.SUITES[k]()) == first
