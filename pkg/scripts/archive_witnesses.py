"""Regenerate the archived counterexample witnesses in tests/fixtures.

Each fixture is a search report for a non-member power at ``n <= 2`` with a
budget of 10^4 evaluations, plus a condition III checker witness at ``n = 2``.
The regression tests replay them; rerun this script only when the sampling
scheme changes on purpose.
"""
import json
from pathlib import Path

from melab.catalog import Power
from melab.membership import ViolationReport, check_condition, search_counterexample, _witness_from_json

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
SEED = 0


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for p in (2.5, 3.0):
        spec = Power(p)
        found = search_counterexample(spec, n_max=2, budget=10_000, seed=SEED)
        if found is None:
            raise SystemExit(f"no violation found for p={p}")
        (FIXTURES / f"search_power_{p:g}.json").write_text(json.dumps(found.to_json(), sort_keys=True, indent=2) + "\n")

        verdict = check_condition("III", spec, 2, 200, SEED)
        w = verdict.witness
        report = ViolationReport(spec.to_json(), "III", 2, _witness_from_json(w["args"]), w["lhs"], w["rhs"], w["gap"],
                                 SEED, verdict.tol, w["trial"] + 1, "checker")
        (FIXTURES / f"check_iii_power_{p:g}_n2.json").write_text(json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n")
        print(f"p={p}: search gap {found.gap:.3e} at n={found.n}; checker gap {w['gap']:.3e} at trial {w['trial']}")


if __name__ == "__main__":
    main()
