"""Domain types for gauge waveforms, inundation grids, and scenario databases.

Conventions used throughout the package:

* heights and depths are meters, times are seconds;
* the uniform time grid starts at ``t = dt`` (not zero), so sample ``i``
  of a waveform corresponds to ``t = (i + 1) * dt``;
* every container stores C-contiguous, read-only ``float64`` arrays and is
  safe to share across threads after construction.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DataCorruptionError,
    DatabaseInconsistencyError,
    InsufficientDataError,
)

DEFAULT_DT = 5.0  # 0.2 Hz sampling
DEFAULT_HORIZON = 14400.0  # four hours of waveform


def readonly_array(values, dtype=np.float64):
    """Copy ``values`` into a C-contiguous read-only array."""
    arr = np.array(values, dtype=dtype, order="C", copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GaugeSeries:
    """Wave-height history at a single offshore gauge on a uniform grid."""

    gauge_id: int
    samples: np.ndarray
    dt: float

    def __post_init__(self):
        object.__setattr__(self, "samples", readonly_array(self.samples))
        if self.samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not np.isfinite(self.samples).all():
            raise DataCorruptionError(
                f"gauge {self.gauge_id}: non-finite sample in waveform"
            )

    def __len__(self):
        return self.samples.shape[0]

    @property
    def times(self):
        """Sample times ``dt, 2*dt, ...`` in seconds."""
        n = self.samples.shape[0]
        return (np.arange(1, n + 1) * self.dt).astype(np.float64)


@dataclass(frozen=True)
class InundationGrid:
    """Maximum inundation depth over a labeled nx-by-ny onshore grid."""

    nx: int
    ny: int
    depths: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "depths", readonly_array(self.depths))
        if self.depths.shape != (self.nx, self.ny):
            raise ValueError(
                f"depth grid shape {self.depths.shape} does not match "
                f"({self.nx}, {self.ny})"
            )
        if not np.isfinite(self.depths).all():
            raise DataCorruptionError("non-finite inundation depth")
        if (self.depths < 0).any():
            raise ValueError("inundation depths must be nonnegative")

    @classmethod
    def from_depths(cls, depths):
        depths = np.asarray(depths, dtype=np.float64)
        return cls(nx=depths.shape[0], ny=depths.shape[1], depths=depths)

    def max_depth(self):
        return float(self.depths.max()) if self.depths.size else 0.0


@dataclass(frozen=True)
class GridGeometry:
    """Descriptive placement of the inundation grid. Labels only, no math."""

    nx: int
    ny: int
    x0: float = 0.0
    y0: float = 0.0
    dx: float = 1.0
    dy: float = 1.0
    label: str = "local"


@dataclass(frozen=True)
class ScenarioRecord:
    """One precomputed scenario: waveforms, inundation grid, risk indices.

    ``waveforms`` has shape ``(n_gauges, n_steps)``. ``eta_max_per_gauge``
    and ``h_max`` are derived quantities; use :func:`recompute_risk_indices`
    (or :meth:`build`) to guarantee they match the raw data.
    """

    scenario_id: int
    waveforms: np.ndarray
    inundation: InundationGrid
    eta_max_per_gauge: np.ndarray
    h_max: float
    dt: float

    def __post_init__(self):
        object.__setattr__(self, "waveforms", readonly_array(self.waveforms))
        object.__setattr__(
            self, "eta_max_per_gauge", readonly_array(self.eta_max_per_gauge)
        )
        if self.waveforms.ndim != 2:
            raise ValueError("waveforms must be a (n_gauges, n_steps) matrix")
        if self.eta_max_per_gauge.shape != (self.waveforms.shape[0],):
            raise ValueError("eta_max_per_gauge length must match gauge count")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @classmethod
    def build(cls, scenario_id, waveforms, inundation, dt):
        """Create a record with risk indices computed from the raw data."""
        waveforms = np.asarray(waveforms, dtype=np.float64)
        stub = cls(
            scenario_id=scenario_id,
            waveforms=waveforms,
            inundation=inundation,
            eta_max_per_gauge=np.zeros(waveforms.shape[0]),
            h_max=0.0,
            dt=dt,
        )
        return recompute_risk_indices(stub)

    @property
    def n_gauges(self):
        return self.waveforms.shape[0]

    @property
    def n_steps(self):
        return self.waveforms.shape[1]

    def gauge_series(self, gauge):
        """View gauge ``gauge`` as a :class:`GaugeSeries`."""
        return GaugeSeries(gauge_id=gauge, samples=self.waveforms[gauge], dt=self.dt)


def recompute_risk_indices(record):
    """Return a copy of ``record`` with risk indices rebuilt from raw data.

    Raises :class:`DataCorruptionError` naming the offending scenario and
    gauge if any waveform sample is non-finite.
    """
    finite = np.isfinite(record.waveforms).all(axis=1)
    if not finite.all():
        gauge = int(np.flatnonzero(~finite)[0])
        raise DataCorruptionError(
            f"scenario {record.scenario_id}, gauge {gauge}: non-finite sample"
        )
    eta_max = record.waveforms.max(axis=1)
    return replace(
        record,
        eta_max_per_gauge=eta_max,
        h_max=record.inundation.max_depth(),
    )


@dataclass(frozen=True)
class ObservationWindow:
    """How much waveform is consumed before issuing a forecast."""

    t_obs: float
    dt: float

    def __post_init__(self):
        if self.t_obs <= 0:
            raise ValueError(f"t_obs must be positive, got {self.t_obs}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def step_count(self):
        # small epsilon so t_obs = k*dt lands on exactly k steps
        return int(math.floor(self.t_obs / self.dt + 1e-9))

    @classmethod
    def for_database(cls, db, t_obs):
        if t_obs > db.n_steps * db.dt + 1e-9:
            raise InsufficientDataError(
                f"t_obs {t_obs} s exceeds the database horizon "
                f"{db.n_steps * db.dt} s"
            )
        return cls(t_obs=t_obs, dt=db.dt)


class ScenarioDatabase:
    """A corpus of scenarios sharing one sampling and grid layout.

    Records are immutable; the database caches stacked tensors of the
    per-scenario arrays for batch numerics.
    """

    def __init__(self, scenarios, grid, dt):
        scenarios = list(scenarios)
        if not scenarios:
            raise DatabaseInconsistencyError("database has no scenarios")
        first = scenarios[0]
        ids = set()
        for rec in scenarios:
            if rec.waveforms.shape != first.waveforms.shape:
                raise DatabaseInconsistencyError(
                    f"scenario {rec.scenario_id}: waveform shape "
                    f"{rec.waveforms.shape} != {first.waveforms.shape}"
                )
            if rec.inundation.depths.shape != (grid.nx, grid.ny):
                raise DatabaseInconsistencyError(
                    f"scenario {rec.scenario_id}: grid shape mismatch"
                )
            if rec.dt != dt:
                raise DatabaseInconsistencyError(
                    f"scenario {rec.scenario_id}: dt {rec.dt} != {dt}"
                )
            if rec.scenario_id in ids:
                raise DatabaseInconsistencyError(
                    f"duplicate scenario id {rec.scenario_id}"
                )
            ids.add(rec.scenario_id)
        self.scenarios = scenarios
        self.grid = grid
        self.dt = float(dt)
        self._waveform_tensor = None
        self._grid_tensor = None

    @property
    def n_scenarios(self):
        return len(self.scenarios)

    @property
    def n_gauges(self):
        return self.scenarios[0].n_gauges

    @property
    def n_steps(self):
        return self.scenarios[0].n_steps

    @property
    def scenario_ids(self):
        return np.array([rec.scenario_id for rec in self.scenarios], dtype=np.int64)

    @property
    def horizon(self):
        return self.n_steps * self.dt

    def __len__(self):
        return len(self.scenarios)

    def __iter__(self):
        return iter(self.scenarios)

    def record(self, scenario_id):
        for rec in self.scenarios:
            if rec.scenario_id == scenario_id:
                return rec
        raise KeyError(f"no scenario with id {scenario_id}")

    def waveform_tensor(self):
        """All waveforms stacked as ``(n_scenarios, n_gauges, n_steps)``."""
        if self._waveform_tensor is None:
            t = np.stack([rec.waveforms for rec in self.scenarios])
            t.flags.writeable = False
            self._waveform_tensor = t
        return self._waveform_tensor

    def grid_tensor(self):
        """All inundation grids stacked as ``(n_scenarios, nx, ny)``."""
        if self._grid_tensor is None:
            t = np.stack([rec.inundation.depths for rec in self.scenarios])
            t.flags.writeable = False
            self._grid_tensor = t
        return self._grid_tensor

    def eta_max_matrix(self):
        """Per-scenario gauge maxima, shape ``(n_scenarios, n_gauges)``."""
        return np.stack([rec.eta_max_per_gauge for rec in self.scenarios])

    def h_max_vector(self):
        return np.array([rec.h_max for rec in self.scenarios])

    def subset(self, positions):
        """New database holding the records at ``positions`` (order kept)."""
        picked = [self.scenarios[int(p)] for p in positions]
        return ScenarioDatabase(picked, self.grid, self.dt)

    def fingerprint(self):
        """SHA-256 over all scenario payloads; stable across processes."""
        import hashlib

        h = hashlib.sha256()
        h.update(repr((self.dt, self.grid)).encode())
        for rec in self.scenarios:
            h.update(np.int64(rec.scenario_id).tobytes())
            h.update(np.ascontiguousarray(rec.waveforms).tobytes())
            h.update(np.ascontiguousarray(rec.inundation.depths).tobytes())
        return h.hexdigest()


def resample_series(times, values, dt, horizon, gauge_id=0):
    """Linearly interpolate a raw (time, value) record onto the uniform grid.

    The output covers ``t = dt, 2*dt, ..., horizon``. Raw times must be
    strictly increasing and must span the requested grid, otherwise an
    :class:`InsufficientDataError` is raised.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if times.ndim != 1 or times.shape != values.shape:
        raise ValueError("times and values must be matching 1-D arrays")
    if times.size < 2:
        raise InsufficientDataError("need at least two raw samples")
    if (np.diff(times) <= 0).any():
        raise ValueError("raw times must be strictly increasing")
    window = ObservationWindow(t_obs=horizon, dt=dt)
    grid = np.arange(1, window.step_count + 1) * dt
    if times[0] > grid[0] + 1e-9 or times[-1] < grid[-1] - 1e-9:
        raise InsufficientDataError(
            f"raw span [{times[0]}, {times[-1]}] s does not cover the "
            f"requested grid [{grid[0]}, {grid[-1]}] s"
        )
    samples = np.interp(grid, times, values)
    return GaugeSeries(gauge_id=gauge_id, samples=samples, dt=dt)
