"""Sequential Bayesian scenario identification in coefficient space.

At every time step the projected observation is compared against each
training scenario's coefficient vector through a Mahalanobis distance
under a diagonal Gaussian; the resulting likelihoods multiply into the
running posterior. All probability arithmetic stays in log space so the
update survives distances far beyond the double-precision underflow
point of the Gaussian itself.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DatabaseInconsistencyError,
    DegenerateLikelihoodWarning,
    InsufficientDataError,
    ModelError,
)
from .pod import project

SCALE_FACTOR = 0.1

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class LikelihoodModel:
    """Diagonal Gaussian over coefficient residuals.

    covariance_diag holds the per-mode variances p_l; the log-likelihood of
    a residual with Mahalanobis distance D is
    -(r/2)ln(2pi) - (1/2)sum(ln p_l) - D^2/2.
    """

    covariance_diag: np.ndarray
    scale_factor: float = SCALE_FACTOR
    r: int = field(init=False)

    def __post_init__(self):
        diag = np.asarray(self.covariance_diag, dtype=np.float64)
        if diag.ndim != 1 or diag.size < 1:
            raise ModelError("covariance diagonal must be a nonempty vector")
        if not (np.isfinite(diag).all() and (diag > 0.0).all()):
            raise ModelError("covariance diagonal must be strictly positive")
        diag = diag.copy()
        diag.flags.writeable = False
        object.__setattr__(self, "covariance_diag", diag)
        object.__setattr__(self, "r", diag.size)
        object.__setattr__(
            self,
            "_log_norm",
            -0.5 * self.r * _LOG_2PI - 0.5 * float(np.log(diag).sum()),
        )

    @classmethod
    def from_basis(cls, basis, scale_factor=SCALE_FACTOR, policy="spectrum"):
        """Build the model from a POD spectrum.

        policy "spectrum" takes the covariance as scale * sqrt(lambda_l)
        per retained mode; "normalized" first divides the spectrum by its
        sum so the covariance is scale * sqrt(lambda_l / sum(lambda)).
        """
        lam = np.asarray(basis.retained_eigenvalues(), dtype=np.float64)
        if policy == "normalized":
            total = lam.sum()
            if total <= 0.0:
                raise ModelError("spectrum sums to zero")
            lam = lam / total
        elif policy != "spectrum":
            raise ModelError(f"unknown covariance policy: {policy!r}")
        diag = scale_factor * np.sqrt(lam)
        if not (diag > 0.0).all():
            raise ModelError(
                "retained spectrum has zero modes; reduce r or switch policy"
            )
        return cls(covariance_diag=diag, scale_factor=scale_factor)


@dataclass(frozen=True)
class PosteriorState:
    """Probability vector over scenarios after ``step`` updates.

    history, when tracking is on, carries one probability vector per
    completed update (index 0 is the state after the first step).
    """

    probs: np.ndarray
    step: int = 0
    history: tuple = None

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size < 1:
            raise ModelError("posterior must be a nonempty vector")
        if (probs < 0.0).any() or abs(probs.sum() - 1.0) > 1e-9:
            raise ModelError("posterior must be normalized and nonnegative")
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n_scenarios, track_history=False):
        probs = np.full(n_scenarios, 1.0 / n_scenarios)
        return cls(probs=probs, step=0, history=() if track_history else None)

    def argmax(self):
        return int(np.argmax(self.probs))


def mahalanobis(alpha_j, alpha_obs, model):
    """Distance between two coefficient vectors under the model covariance."""
    a = np.asarray(alpha_j, dtype=np.float64)
    b = np.asarray(alpha_obs, dtype=np.float64)
    if a.shape != b.shape or a.shape != (model.r,):
        raise DatabaseInconsistencyError(
            "coefficient vectors must both have the model's length"
        )
    diff = a - b
    return float(np.sqrt(np.sum(diff * diff / model.covariance_diag)))


def log_likelihood(distance, model):
    """Log of the Gaussian likelihood at a given Mahalanobis distance."""
    return model._log_norm - 0.5 * distance * distance


def likelihood(distance, model):
    """Gaussian likelihood; underflows to 0.0 for very large distances."""
    if not np.isfinite(distance):
        raise ModelError("distance must be finite")
    return math.exp(log_likelihood(float(distance), model))


def _log_likelihood_vector(coeff_block, alpha_obs, model):
    """Log-likelihood of every scenario's coefficients against one
    observation, shape (N_s,). coeff_block is (N_s, r)."""
    diff = coeff_block - alpha_obs[None, :]
    # an overflowing squared distance means a vanishing likelihood, which
    # the caller handles; the inf is intentional
    with np.errstate(over="ignore"):
        d2 = np.sum(diff * diff / model.covariance_diag[None, :], axis=1)
        return model._log_norm - 0.5 * d2


def update(state, alpha_obs, coeff_block, model):
    """One Bayes step: multiply the prior by per-scenario likelihoods.

    coeff_block is the (N_s, r) matrix of scenario coefficients at the
    current time index. Scenarios with zero prior stay at zero. If every
    scenario's posterior mass vanishes (all log-likelihoods -inf against
    nonzero priors), the prior is kept and a warning is emitted.
    """
    alpha_obs = np.asarray(alpha_obs, dtype=np.float64)
    block = np.asarray(coeff_block, dtype=np.float64)
    if block.ndim != 2 or block.shape != (state.probs.size, model.r):
        raise DatabaseInconsistencyError(
            "coefficient block must be (n_scenarios, r)"
        )
    with np.errstate(divide="ignore"):
        log_prior = np.log(state.probs)
    log_post = log_prior + _log_likelihood_vector(block, alpha_obs, model)

    peak = np.max(log_post)
    if not np.isfinite(peak):
        warnings.warn(
            "every scenario's likelihood vanished at this step; "
            "keeping the prior",
            DegenerateLikelihoodWarning,
            stacklevel=2,
        )
        probs = state.probs
    else:
        unnorm = np.exp(log_post - peak)
        probs = unnorm / unnorm.sum()

    history = state.history
    if history is not None:
        history = history + (probs,)
    return PosteriorState(probs=probs, step=state.step + 1, history=history)


def run_sequence(coeffs, basis, observed, model, prior=None, window=None,
                 track_history=False):
    """Drive the full project/likelihood/update loop over an observation.

    Parameters
    ----------
    coeffs : CoefficientSet
        Training coefficients (scenario blocks in database order).
    basis : PodBasis
        Basis the coefficients were extracted with.
    observed : (N_g, n_obs) ndarray
        Gauge waveforms observed so far, one column per time step.
    model : LikelihoodModel
    prior : PosteriorState, optional
        Defaults to uniform over the coefficient set's scenarios.
    window : ObservationWindow, optional
        Restricts the update to the first ``window.step_count`` columns.
    track_history : bool
        Keep a posterior snapshot per step (overridden by a prior that
        already tracks history).

    Returns
    -------
    PosteriorState
    """
    observed = np.asarray(observed, dtype=np.float64)
    if observed.ndim != 2 or observed.shape[0] != basis.n_gauges:
        raise DatabaseInconsistencyError(
            "observed waveforms must be (n_gauges, n_steps)"
        )
    n_obs = observed.shape[1]
    if window is not None:
        n_obs = min(n_obs, window.step_count)
    if n_obs < 1:
        raise InsufficientDataError(
            "observation must cover at least one time step"
        )
    if n_obs > coeffs.n_steps:
        raise InsufficientDataError(
            "observation runs past the training horizon"
        )
    state = prior
    if state is None:
        state = PosteriorState.uniform(
            coeffs.n_scenarios, track_history=track_history
        )
    if state.probs.size != coeffs.n_scenarios:
        raise DatabaseInconsistencyError(
            "prior length does not match the coefficient set"
        )
    for t in range(n_obs):
        alpha_obs = project(basis, observed[:, t])
        state = update(state, alpha_obs, coeffs.at_step(t), model)
    return state


def write_posterior_csv(state, scenario_ids, path):
    """Per-step posterior log as (step, scenario_id, prob) rows."""
    if state.history is None:
        raise ModelError("posterior was run without history tracking")
    lines = ["step,scenario_id,prob"]
    for step, probs in enumerate(state.history, start=1):
        for sid, p in zip(scenario_ids, probs):
            lines.append(f"{step},{sid},{repr(float(p))}")
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")
