"""Shared fixtures and the acceptance-criteria summary printer."""

import numpy as np
import pytest

from tsucast.core import (
    GridGeometry,
    InundationGrid,
    ScenarioDatabase,
    ScenarioRecord,
)
from tsucast.synthgen import GenConfig, generate_database

# ---------------------------------------------------------------------------
# acceptance-criteria reporting: every criterion test records its outcome
# here and a terminal-summary hook prints one line per criterion at the end
# of the run, pass or fail.

ACCEPTANCE_RESULTS = []


def record_criterion(number, label, outcome, detail=""):
    ACCEPTANCE_RESULTS.append((number, label, outcome, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, label, outcome, detail in sorted(ACCEPTANCE_RESULTS):
        line = f"criterion {number:2d} {outcome}: {label}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# databases shared across test modules. All are deterministic, so session
# scope is safe; records and databases are immutable.


@pytest.fixture(scope="session")
def default_db():
    """The frozen full-scale synthetic database (200 x 16 x 720)."""
    return generate_database(GenConfig())


@pytest.fixture(scope="session")
def toy_db():
    """20 scenarios, 8 gauges, 120 steps; small enough for exhaustive
    self-detection checks."""
    return generate_database(
        GenConfig(n_scenarios=20, n_gauges=8, n_steps=120, rng_seed=7)
    )


@pytest.fixture(scope="session")
def small_db():
    """24 scenarios on a small grid; used by harness and CLI tests."""
    return generate_database(
        GenConfig(
            n_scenarios=24, n_gauges=6, n_steps=96, rng_seed=3,
            grid_nx=12, grid_ny=10,
        )
    )


def make_db(waveform_blocks, ids=None, dt=5.0, depth_grids=None,
            grid_shape=(2, 2)):
    """Hand-built database from raw (n_gauges, n_steps) waveform blocks.

    depth_grids, when given, is one (nx, ny) array per scenario; the
    default is an all-zero grid of ``grid_shape``.
    """
    blocks = [np.asarray(b, dtype=np.float64) for b in waveform_blocks]
    if ids is None:
        ids = list(range(len(blocks)))
    if depth_grids is None:
        depth_grids = [np.zeros(grid_shape) for _ in blocks]
    records = []
    for sid, block, depths in zip(ids, blocks, depth_grids):
        records.append(
            ScenarioRecord.build(
                scenario_id=sid,
                waveforms=block,
                inundation=InundationGrid.from_depths(np.asarray(depths)),
                dt=dt,
            )
        )
    nx, ny = records[0].inundation.depths.shape
    return ScenarioDatabase(records, GridGeometry(nx=nx, ny=ny), dt)
