import pytest

from rcfm.verify import SUITES, run_suite


@pytest.mark.parametrize("suite", SUITES)
def test_suite_passes(suite):
    failed = [c for c in run_suite(suite, seed=1) if not c.passed]
    assert not failed, failed


def test_suites_are_reproducible():
    assert run_suite("ring", seed=3) == run_suite("ring", seed=3)
