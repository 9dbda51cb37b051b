"""Every acceptance criterion at its stated tolerance; one pass/fail line each."""
import pytest

from relhom import suite

CRITERIA = [
    (1, suite.criterion_1),
    (2, suite.criterion_2),
    (3, suite.criterion_3),
    (4, suite.criterion_4),
    (5, suite.criterion_5),
    (6, suite.criterion_6),
    (7, suite.criterion_7),
    (8, suite.criterion_8),
    (9, suite.criterion_9),
    (10, suite.criterion_10),
]


@pytest.mark.parametrize("cid,fn", CRITERIA, ids=[f"criterion_{c}" for c, _ in CRITERIA])
def test_criterion(cid, fn, capsys):
    result = fn()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.id == cid
    failed = [name for name, ok in result.checks.items() if not ok]
    assert result.passed, f"criterion {cid} failed: {failed}"
