"""Proper orthogonal decomposition of the stacked gauge waveforms.

The data matrix stacks every scenario's gauge snapshots column by column,
so each column is one instant seen at all gauges. Because the gauge count
is small, the decomposition works on the gauge-by-gauge Gram matrix: its
eigenvectors are the spatial modes and its eigenvalues the squared
singular values of the data matrix. Nothing is mean-centered.
"""

from dataclasses import dataclass

import numpy as np

from .core import readonly_array
from .errors import (
    ConfigError,
    DataCorruptionError,
    DatabaseInconsistencyError,
    DegenerateInputError,
)

DEFAULT_THRESHOLD = 0.9

# Orthonormality slack above which the transpose shortcut for the
# pseudoinverse is abandoned for the general Moore-Penrose routine.
_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class ModeRule:
    """How many modes to keep: a cumulative-contribution threshold or a
    fixed count.

    Parameters
    ----------
    kind : str
        Either ``"threshold"`` or ``"fixed"``.
    value : float
        The threshold in (0, 1] or the fixed mode count (>= 1).
    """

    kind: str
    value: float

    def __post_init__(self):
        if self.kind == "threshold":
            if not 0.0 < self.value <= 1.0:
                raise ConfigError("threshold must lie in (0, 1]")
        elif self.kind == "fixed":
            if self.value < 1 or self.value != int(self.value):
                raise ConfigError("fixed mode count must be a positive integer")
        else:
            raise ConfigError(f"unknown mode rule kind: {self.kind!r}")

    @classmethod
    def threshold(cls, theta=DEFAULT_THRESHOLD):
        return cls("threshold", float(theta))

    @classmethod
    def fixed(cls, r):
        return cls("fixed", int(r))


@dataclass(frozen=True)
class PodBasis:
    """Truncated spatial basis.

    Attributes
    ----------
    modes : (N_g, r) ndarray
        Orthonormal spatial modes, one column per retained mode.
    singular_values : (m,) ndarray
        Squared singular values of the data matrix in descending order,
        m = min(N_g, number of columns).
    pseudoinverse : (r, N_g) ndarray
        Projector onto coefficient space.
    r : int
        Retained mode count.
    contribution : (m,) ndarray
        Cumulative contribution ratio; ``contribution[k-1]`` is c(k).
    """

    modes: np.ndarray
    singular_values: np.ndarray
    pseudoinverse: np.ndarray
    r: int
    contribution: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "modes", readonly_array(self.modes))
        object.__setattr__(
            self, "singular_values", readonly_array(self.singular_values)
        )
        object.__setattr__(
            self, "pseudoinverse", readonly_array(self.pseudoinverse)
        )
        object.__setattr__(
            self, "contribution", readonly_array(self.contribution)
        )
        n_g, r = self.modes.shape
        if r != self.r or self.pseudoinverse.shape != (r, n_g):
            raise DatabaseInconsistencyError("basis shapes are inconsistent")

    @property
    def n_gauges(self):
        return self.modes.shape[0]

    def retained_eigenvalues(self):
        """The first r entries of the spectrum, as used by likelihood models."""
        return self.singular_values[: self.r]


@dataclass(frozen=True)
class CoefficientSet:
    """Projected training waveforms, one r-by-N_t block per scenario.

    ``coeffs[i]`` belongs to ``scenario_ids[i]``; ids keep database order.
    """

    scenario_ids: tuple
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", readonly_array(self.coeffs))
        object.__setattr__(self, "scenario_ids", tuple(self.scenario_ids))
        if self.coeffs.ndim != 3 or self.coeffs.shape[0] != len(self.scenario_ids):
            raise DatabaseInconsistencyError("coefficient block count mismatch")

    @property
    def n_scenarios(self):
        return self.coeffs.shape[0]

    @property
    def r(self):
        return self.coeffs.shape[1]

    @property
    def n_steps(self):
        return self.coeffs.shape[2]

    def matrix(self, scenario_id):
        """Coefficient block (r, N_t) of one scenario."""
        i = self.scenario_ids.index(scenario_id)
        return self.coeffs[i]

    def at_step(self, step):
        """Coefficient vectors of every scenario at one time index, (N_s, r)."""
        return self.coeffs[:, :, step]


def assemble_matrix(db):
    """Stack the database into the (N_g, N_t*N_s) data matrix.

    Column block j holds scenario j's waveforms in database order, so
    column j*N_t + t is the gauge snapshot of scenario j at step t.
    """
    if db.n_scenarios < 1:
        raise DatabaseInconsistencyError("cannot assemble an empty database")
    tensor = db.waveform_tensor()  # (N_s, N_g, N_t)
    return np.ascontiguousarray(
        tensor.transpose(1, 0, 2).reshape(db.n_gauges, -1)
    )


def compute_basis(X, mode_rule=None):
    """Eigendecompose the Gram matrix of ``X`` and truncate per ``mode_rule``.

    Parameters
    ----------
    X : (N_g, N_c) ndarray
        Data matrix, finite.
    mode_rule : ModeRule, optional
        Defaults to the 0.9 cumulative-contribution threshold.

    Returns
    -------
    PodBasis
    """
    if mode_rule is None:
        mode_rule = ModeRule.threshold()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DegenerateInputError("data matrix must be 2-D")
    if not np.isfinite(X).all():
        raise DataCorruptionError("data matrix contains non-finite entries")

    gram = X @ X.T
    eigvals, eigvecs = np.linalg.eigh(gram)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]

    total = eigvals.sum()
    if total <= 0.0:
        raise DegenerateInputError("data matrix is identically zero")

    m = min(X.shape)
    eigvals = eigvals[:m]
    eigvecs = eigvecs[:, :m]
    contribution = np.cumsum(eigvals) / total

    # eigh's sign choice is arbitrary; pin each mode's dominant entry positive
    flip = np.sign(eigvecs[np.argmax(np.abs(eigvecs), axis=0),
                           np.arange(eigvecs.shape[1])])
    flip[flip == 0.0] = 1.0
    eigvecs = eigvecs * flip

    if mode_rule.kind == "fixed":
        r = int(mode_rule.value)
        if r > m:
            raise ConfigError(f"fixed mode count {r} exceeds available {m}")
    else:
        r = int(np.searchsorted(contribution, mode_rule.value - 1e-12) + 1)
        r = min(r, m)

    modes = eigvecs[:, :r]
    deviation = np.abs(modes.T @ modes - np.eye(r)).max()
    if deviation <= _ORTHO_TOL:
        pinv = modes.T.copy()
    else:
        pinv = np.linalg.pinv(modes, rcond=1e-12)

    return PodBasis(
        modes=modes,
        singular_values=eigvals,
        pseudoinverse=pinv,
        r=r,
        contribution=contribution,
    )


def project(basis, snapshot):
    """Project one gauge snapshot into coefficient space.

    Parameters
    ----------
    basis : PodBasis
    snapshot : (N_g,) array_like

    Returns
    -------
    (r,) ndarray
    """
    snapshot = np.asarray(snapshot, dtype=np.float64)
    if snapshot.shape != (basis.n_gauges,):
        raise DatabaseInconsistencyError(
            f"snapshot length {snapshot.shape} does not match "
            f"{basis.n_gauges} gauges"
        )
    if not np.isfinite(snapshot).all():
        raise DataCorruptionError("snapshot contains non-finite values")
    return basis.pseudoinverse @ snapshot


def extract_coefficients(basis, db):
    """Project every snapshot of every scenario; blocks keep database order."""
    tensor = db.waveform_tensor()
    if tensor.shape[1] != basis.n_gauges:
        raise DatabaseInconsistencyError(
            "database gauge count does not match the basis"
        )
    if not np.isfinite(tensor).all():
        raise DataCorruptionError("database waveforms contain non-finite values")
    coeffs = np.einsum("rg,sgt->srt", basis.pseudoinverse, tensor)
    return CoefficientSet(scenario_ids=db.scenario_ids, coeffs=coeffs)


def save_basis(basis, path):
    """Write a basis to ``path`` (exact filename, zip archive inside)."""
    with open(path, "wb") as f:
        np.savez(
            f,
            modes=basis.modes,
            singular_values=basis.singular_values,
            pseudoinverse=basis.pseudoinverse,
            r=np.int64(basis.r),
            contribution=basis.contribution,
        )


def load_basis(path):
    with np.load(path) as data:
        try:
            return PodBasis(
                modes=data["modes"],
                singular_values=data["singular_values"],
                pseudoinverse=data["pseudoinverse"],
                r=int(data["r"]),
                contribution=data["contribution"],
            )
        except KeyError as exc:
            raise DataCorruptionError(f"basis file missing field {exc}") from exc


def save_coefficients(cset, path):
    with open(path, "wb") as f:
        np.savez(
            f,
            scenario_ids=np.asarray(cset.scenario_ids, dtype=np.int64),
            coeffs=cset.coeffs,
        )


def load_coefficients(path):
    with np.load(path) as data:
        try:
            ids = tuple(int(i) for i in data["scenario_ids"])
            return CoefficientSet(scenario_ids=ids, coeffs=data["coeffs"])
        except KeyError as exc:
            raise DataCorruptionError(
                f"coefficient file missing field {exc}"
            ) from exc


def write_contribution_csv(basis, path):
    """Emit the (r, c(r)) table for plotting."""
    lines = ["r,c"]
    for k, c in enumerate(basis.contribution, start=1):
        lines.append(f"{k},{repr(float(c))}")
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")
