import numpy as np
import pytest

from qbphase.experiments import run_scenario

# criterion number -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record_criterion(number, title, passed, detail):
    ACCEPTANCE[number] = (title, bool(passed), detail)
    print(f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}: {detail}")


_RUNS = {}


def cached_run(cfg):
    """Run a config once per session; configs differing only in labels share a run."""
    key = cfg.replace(name="x", figure=None, output=None)
    if key not in _RUNS:
        _RUNS[key] = run_scenario(cfg)
    return _RUNS[key]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        tr.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {title}  ({detail})")
    missing = [n for n in range(1, 15) if n not in ACCEPTANCE]
    if missing:
        tr.write_line(f"not run: {missing}")
