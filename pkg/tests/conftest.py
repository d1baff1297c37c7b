"""Collects acceptance-check outcomes and prints one line per criterion at the end of the run."""
from collections import defaultdict

import pytest

_RESULTS: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)
TITLES = {
    1: "classical sector tables",
    2: "closed-form counts",
    3: "EFS dimensions",
    4: "quantum decompositions",
    5: "EFS entanglement",
    6: "spectral statistics",
    7: "breakdown and East models",
}


@pytest.fixture
def record():
    """``record(criterion, name, ok, detail)`` stores and prints one check, returning ``ok``."""
    def _record(criterion: int, name: str, ok: bool, detail: str = "") -> bool:
        _RESULTS[criterion].append((name, bool(ok), detail))
        print(f"[criterion {criterion}] {name}: {'PASS' if ok else 'FAIL'} {detail}")
        return bool(ok)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(_RESULTS):
        checks = _RESULTS[c]
        bad = [n for n, ok, _ in checks if not ok]
        status = "PASS" if not bad else "FAIL"
        tail = f"{len(checks) - len(bad)}/{len(checks)} checks"
        if bad:
            tail += "; failing: " + ", ".join(bad)
        tr.write_line(f"criterion {c} ({TITLES.get(c, '')}): {status} [{tail}]")
    for c in sorted(_RESULTS):
        for name, ok, detail in _RESULTS[c]:
            if not ok:
                tr.write_line(f"  criterion {c} / {name}: {detail}")
