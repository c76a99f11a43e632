import os

import pytest
from hypothesis import HealthCheck, settings

from modcirc.circuit import Circuit, Gate

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def single_gate(m, n, accept, mults=None, var_order=None):
    """Inputs 0..n-1 feeding one root gate n."""
    mults = mults or [1] * n
    gates = {i: Gate.input(i) for i in range(n)}
    gates[n] = Gate.mod(accept)
    wires = {(i, n): k for i, k in enumerate(mults) if k}
    return Circuit(m, n, gates, wires, n)


@pytest.fixture
def and2_circuit():
    # x0 + x1 = 2 mod 3 only on the all-ones input
    return single_gate(3, 2, {2})


ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
