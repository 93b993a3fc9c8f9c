import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from arena import _backend  # noqa: E402

BACKENDS = [("python", _backend.PyState)]
if _backend.CState is not None:
    BACKENDS.append(("compiled", _backend.CState))


@pytest.fixture(params=[b[1] for b in BACKENDS], ids=[b[0] for b in BACKENDS])
def state_cls(request):
    """Each kernel implementation in turn."""
    return request.param


def rebuild(cls, s):
    """Copy a state into another backend class through the public export."""
    return cls(s.n, s.board, s.hidden, s.flames, s.bombs, s.agents, s.tick, s.max_ticks,
               s.mode, s.flame_life, s.bomb_life, s.initial_wood)


# -- acceptance summary ------------------------------------------------------

def pytest_configure(config):
    config._acceptance = {}


@pytest.fixture(scope="session")
def acceptance_log(request):
    """criterion number -> (passed, detail); printed at the end of the run."""
    return request.config._acceptance


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
