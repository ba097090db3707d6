import json

import numpy as np
import pytest

from melab.catalog import Affine, Power, StandardEntropy
from melab.errors import DomainError
from melab.membership import (
    CONDITION_DEFS,
    CONDITIONS,
    MODES,
    Slack,
    _perturb,
    ViolationReport,
    check_condition,
    cross_equivalence,
    equivalence_suite_specs,
    search_counterexample,
    slack_i,
    slack_ii,
    slack_iii,
    slack_iv,
)
from melab.sampling import trial_rng

from conftest import herm, pd_matrix


def test_slack_orientation():
    sl = Slack(lhs=1.0, rhs=3.0, gap=-1e-7)
    assert sl.scale == 4.0
    assert sl.violates(1e-8) and not sl.violates(1e-7)


def test_slacks_vanish_at_coincident_endpoints():
    spec = StandardEntropy()
    x, y, h = pd_matrix(2, 1), pd_matrix(2, 2), herm(2, 3)
    for sl in (slack_i(spec, x, x, h, 0.3), slack_ii(spec, x, x, h, h, 0.3), slack_iii(spec, x, x, y, y, 0.3)):
        assert abs(sl.gap) <= 1e-12 * sl.scale
    assert abs(slack_iv(spec, x, x, y, y, 0.3).gap) <= 1e-12


def test_power_two_is_exactly_tight_in_iii():
    # f = 2t makes Tr (y - x)(f(y) - f(x)) = 2 ||y - x||^2, a convex quadratic.
    spec = Power(2.0)
    args = CONDITION_DEFS["III"].draw(2, trial_rng(0, 0), 0)
    assert slack_iii(spec, **args).gap >= -1e-12


def test_draw_is_deterministic_and_positive():
    for name, cond in CONDITION_DEFS.items():
        for trial in range(2 * len(MODES)):
            a = cond.draw(3, trial_rng(9, trial), trial)
            b = cond.draw(3, trial_rng(9, trial), trial)
            assert a.keys() == b.keys()
            for key in cond.positive:
                np.testing.assert_array_equal(a[key], b[key])
                assert np.linalg.eigvalsh(a[key])[0] > 0
            assert 0.0 <= a["lam"] <= 1.0
            if trial % 2 == 0:
                assert a["lam"] == 0.5


@pytest.mark.parametrize("condition", CONDITIONS)
def test_member_passes(condition):
    verdict = check_condition(condition, StandardEntropy(), 2, 60, seed=4)
    assert verdict.passed and verdict.witness is None
    assert verdict.worst_relative_gap >= -1e-8


@pytest.mark.parametrize("condition", CONDITIONS)
def test_non_member_fails_with_witness(condition):
    verdict = check_condition(condition, Power(3.0), 2, 200, seed=4)
    assert not verdict.passed
    w = verdict.witness
    assert w["gap"] < -1e-8 * (1 + abs(w["rhs"]))
    assert set(w["args"]) == {*CONDITION_DEFS[condition].positive, *CONDITION_DEFS[condition].hermitian, "lam"}


def test_affine_short_circuit():
    verdict = check_condition("II", Affine(1, 2), 3, 100, seed=0)
    assert verdict.passed and verdict.trials == 0
    assert verdict.note == "affine: member by definition"
    assert cross_equivalence(Affine(0, 1), 2, 10, 0).status == "affine"


def test_non_convex_is_rejected():
    with pytest.raises(DomainError):
        check_condition("I", Power(0.5), 2, 10, 0)


def test_cross_equivalence_statuses():
    assert cross_equivalence(Power(1.5), 2, 60, 1).status == "member"
    report = cross_equivalence(Power(3.0), 2, 200, 1)
    assert report.agree and report.status == "violation"
    doc = report.to_json()
    assert json.loads(json.dumps(doc)) == doc


def test_checker_is_reproducible():
    a = cross_equivalence(Power(2.5), 2, 40, 17).to_json()
    b = cross_equivalence(Power(2.5), 2, 40, 17).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_search_finds_and_replays():
    report = search_counterexample(Power(3.0), n_max=2, budget=2000, seed=5)
    assert report is not None and report.gap < -1e-6
    assert report.replay_matches()
    back = ViolationReport.from_json(json.loads(json.dumps(report.to_json())))
    assert back.replay_matches()
    assert back.gap == report.gap


def test_perturb_keeps_hermitian_arguments():
    cond = CONDITION_DEFS["II"]
    args = cond.draw(3, trial_rng(2, 0), 0)
    rng = trial_rng(2, 1)
    for _ in range(20):
        out = _perturb(args, cond, rng, 0.5)
        changed = [k for k in (*cond.positive, *cond.hermitian) if not np.array_equal(out[k], args[k])]
        assert len(changed) == 1
        m = out[changed[0]]
        np.testing.assert_array_equal(m, m.conj().T)


def test_search_none_for_members():
    assert search_counterexample(Power(1.5), n_max=2, budget=400, seed=0) is None
    assert search_counterexample(Affine(1, 1), budget=10, seed=0) is None


def test_suite_has_thirty_specs():
    specs = equivalence_suite_specs(0)
    assert len(specs) >= 30
    assert {s.to_json()["p"] for s in specs if s.kind == "power"} >= {1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0}
