"""Shared Monte Carlo ensembles and the acceptance summary."""

from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from elephant_lab.urn import urn_ensemble  # noqa: E402
from elephant_lab.walk import WalkConfig, memory_for_exponent, walk_endpoints  # noqa: E402

A = Fraction(3, 4)
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    def record(k: int, passed: bool, detail: str) -> None:
        ACCEPTANCE[k] = (bool(passed), detail)
        print(f"criterion {k}: {'PASS' if passed else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def walk_d1_limit():
    """S_n / n^a for d=1, q=(1,0), a=3/4: n = 1e5, 1e5 replicas."""
    n = 10**5
    cfg = WalkConfig(1, memory_for_exponent(1, A), (1, 0), n, seed=2024)
    return walk_endpoints(cfg, 10**5)[:, 0] / n**0.75


@pytest.fixture(scope="session")
def walk_d2_uniform_limit():
    """S_n / n^a for d=2, uniform q, a=3/4: n = 2e4, 2e4 replicas."""
    n = 2 * 10**4
    cfg = WalkConfig(2, memory_for_exponent(2, A), (Fraction(1, 4),) * 4, n, seed=7)
    return walk_endpoints(cfg, 2 * 10**4) / n**0.75


@pytest.fixture(scope="session")
def urn_e1():
    """Final compositions from one ball of colour e1, a=3/4, n = 1e5 draws, 1e4 replicas per d."""
    return {d: urn_ensemble(d, memory_for_exponent(d, A), 10**5, 10**4, seed=11 + d, initial_color=0)
            for d in (1, 2, 3)}
