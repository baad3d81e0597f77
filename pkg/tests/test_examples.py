import pytest

from branchcut.errors import SchemaError
from branchcut.examples import run_example


@pytest.mark.parametrize("n", range(1, 9))
def test_example_passes(n):
    rep = run_example(n)
    failed = [c.name for c in rep.checks if not c.passed]
    assert rep.checks and not failed


def test_example_report_json():
    d = run_example(1).to_json()
    assert d["id"] == 1 and d["passed"] is True and d["checks"]


def test_invalid_id():
    with pytest.raises(SchemaError):
        run_example(0)
