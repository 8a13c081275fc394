from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

from baileyforge.series import HalfExp, make

FROZEN_PATH = Path(__file__).parent / "data" / "frozen.json"


@pytest.fixture(scope="session")
def frozen():
    return json.loads(FROZEN_PATH.read_text())


def series_from_triples(triples, order_steps: int):
    """Kernel series from frozen ``[q_steps, z, coeff]`` triples."""
    return make([(HalfExp(q), {z: c}) for q, z, c in triples], HalfExp(order_steps))


def as_triples(s, upto_steps: int | None = None):
    lim = s.trunc_order.steps if upto_steps is None else upto_steps
    return sorted([e.steps, z, c] for e, p in s.terms() if e.steps <= lim for z, c in p.items())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
