import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from skewminor import QQ, LabeledMatrix  # noqa: E402

DATA = Path(__file__).parent / "data"

_ACCEPTANCE: list[tuple[str, str, bool]] = []


@pytest.fixture
def fixture4():
    """Dense, HL-indecomposable 4x4 over QQ; order-2 minors 1,1,1,1,4,9 and det 4."""
    return LabeledMatrix.from_upper(4, {(1, 2): 1, (1, 3): 1, (1, 4): 1, (2, 3): 1, (2, 4): 2, (3, 4): 3}, QQ)


@pytest.fixture
def data_dir():
    return DATA


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and rep.when == "call":
        _ACCEPTANCE.append((marker.args[0], marker.args[1], rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    merged: dict[str, list] = {}
    for cid, title, ok in _ACCEPTANCE:
        entry = merged.setdefault(cid, [title, True])
        entry[1] = entry[1] and ok
    for cid in sorted(merged, key=int):
        title, ok = merged[cid]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {cid:>2}. {title}")
