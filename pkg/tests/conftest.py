import numpy as np
import pytest

from spinbath.model import build_model
from spinbath.state import PureState, SpinLayout, make_rng


def random_state(layout: SpinLayout, seed: int) -> PureState:
    rng = make_rng(seed)
    z = rng.standard_normal(layout.total_dim) + 1j * rng.standard_normal(layout.total_dim)
    return PureState(layout, z / np.linalg.norm(z))


@pytest.fixture
def small_spec():
    """N=4 ring with every coupling random, the most generic small model."""
    return build_model(4, 2, -5.0, "heisenberg-like", 0.15, "heisenberg-like", 0.8, seed=11)


# one line per acceptance criterion, filled by test_acceptance and printed after the run
ACCEPTANCE_LINES: dict[str, str] = {}


def report(criterion: str, passed: bool, detail: str) -> str:
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k.split()[0][1:])):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
