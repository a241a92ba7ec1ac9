"""Acceptance gate: one pass/fail line per criterion.

Run with -v (or -s) to see the per-criterion detail strings.
"""

import pytest

from borelsum import acceptance

IDS = [name.split()[0] for name, _ in acceptance.ALL_CHECKS]


@pytest.mark.parametrize("name,check", acceptance.ALL_CHECKS, ids=IDS)
def test_acceptance(name, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        status = "PASS" if ok else "FAIL"
        print(f"\n{status}  {name}: {detail}")
    assert ok, f"{name}: {detail}"
