import sys
import warnings
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from patchyrx import ChannelParams, SimConfig, fibonacci_layout, simulate  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion."""
    def _report(number: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {detail}")
        print(ACCEPTANCE_LINES[-1])
        return passed
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def n11_run():
    """Desk-scale simulation of 11 evenly spread patches at A=0.05, shared across modules."""
    params = ChannelParams.paper_defaults()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        layout = fibonacci_layout(11, 0.05, params.r_R)
    cfg = SimConfig(params, layout, dt=1e-5, t_end=1.0, realizations=200, seed=2024,
                    bin_width=0.02)
    return cfg, simulate(cfg)
