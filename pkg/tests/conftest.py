from __future__ import annotations

import functools

import pytest

from colpart.algebra import AlgebraContext
from colpart.groups import cyclic, trivial
from colpart.rings import GF, QQ, ZZ, parse_ring

# criterion number -> (passed, description); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@functools.lru_cache(maxsize=None)
def context(n: int, group: str = "trivial", delta: int = 1, ring: str = "Q") -> AlgebraContext:
    G = {"trivial": trivial(), "C2": cyclic(2)}[group]
    return AlgebraContext(n, G, delta, parse_ring(ring))


@pytest.fixture
def ctx2c2():
    return context(2, "C2", 1, "Q")


@pytest.fixture
def ctx2():
    return context(2, "trivial", 1, "Q")


RINGS = {"Q": QQ, "Z": ZZ, "F2": GF(2), "F3": GF(3)}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, desc = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {desc}")
