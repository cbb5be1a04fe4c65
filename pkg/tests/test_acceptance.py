"""The ten acceptance criteria, each at its stated bound.

Every test prints the criterion's pass/fail line straight to the terminal,
so the lines also appear in a captured ``pytest -v`` log.
"""

import pytest

from pcalab.acceptance import CRITERIA, parse_selection


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number](0)
    with capsys.disabled():
        print()
        print(result.line)
    assert result.passed, "\n".join(result.log_lines())


def test_selection_syntax():
    assert parse_selection("1-3,7") == [1, 2, 3, 7]
    assert parse_selection("all") == list(range(1, 11))
    with pytest.raises(ValueError):
        parse_selection("11")
