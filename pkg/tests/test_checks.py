import pytest

from svbsde.checks import SUITES, CheckConfig, run_suite

SMALL = {"solver-oracle": 4, "contraction": 1, "three-form": 4, "repr": 4}


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes_on_a_few_cases(name):
    results = run_suite(name, CheckConfig(seed=7), SMALL.get(name, 15))
    assert results
    failed = [r.line() for r in results if not r.passed]
    assert not failed, failed


@pytest.mark.parametrize("name", ["hukuhara", "setrv", "solver-oracle"])
def test_negative_tolerance_fails(name):
    results = run_suite(name, CheckConfig(seed=1, tolerance=-1.0), SMALL.get(name, 5))
    assert any(not r.passed for r in results)


def test_results_are_seeded():
    a = [r.to_dict() for r in run_suite("geometry", CheckConfig(seed=3), 10)]
    b = [r.to_dict() for r in run_suite("geometry", CheckConfig(seed=3), 10)]
    for x, y in zip(a, b):
        x.pop("seconds"), y.pop("seconds")
    assert a == b


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope", CheckConfig())
