"""Acceptance criteria 1-10, one test and one printed PASS/FAIL line each.

Run directly (``python3 tests/test_acceptance.py``) for just the lines.
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from immersionkit import checks  # noqa: E402

LINES: list[str] = []


def _report(result):
    line = result.line()
    LINES.append(line)
    print(line)
    for failure in result.failures[:5]:
        print("    " + failure)
    return result


@pytest.fixture(scope="module")
def union_obs():
    return checks.union_obstruction_set()


@pytest.fixture(scope="module")
def family_search_run():
    return checks.criterion_8()


def test_criterion_01_immersion_matches_lift_delete_oracle():
    assert _report(checks.criterion_1()).passed


def test_criterion_02_pattern_formula_matches_immersion():
    assert _report(checks.criterion_2()).passed


def test_criterion_03_line_graph_width_transfer():
    assert _report(checks.criterion_3()).passed


def test_criterion_04_expansion_gaifman_width():
    assert _report(checks.criterion_4()).passed


def test_criterion_05_doubling_argument_on_unique_linkages():
    assert _report(checks.criterion_5()).passed


def test_criterion_06_double_subgraph_and_pendant_linkage():
    assert _report(checks.criterion_6()).passed


def test_criterion_07_union_obstructions_match_oracle(union_obs):
    assert _report(checks.criterion_7(union_obs)).passed


def test_criterion_08_family_search_recovers_obstructions(family_search_run):
    assert _report(family_search_run[0]).passed


def test_criterion_09_treewidth_matches_brute_force():
    assert _report(checks.criterion_9()).passed


def test_criterion_10_antichain_and_characterization(union_obs, family_search_run):
    assert _report(checks.criterion_10(union_obs, family_search_run[1])).passed


if __name__ == "__main__":
    results = checks.run_all()
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
