"""Monte Carlo coordinate maximisation of the fitness likelihood.

One iteration picks a uniformly random coordinate, draws a handful of
Gaussian proposals around its current value (re-sampled until positive),
scores them through the incremental likelihood and keeps the best of
{incumbent, proposals}.  The objective (the log-likelihood without the
first-row factor, which no fitness value can influence) therefore never
decreases.  Iteration stops once no single step in a trailing window gained
at least the threshold ``tol``, or at ``max_iter``.

The recovered values are meaningful mostly through their ranking, and mostly
for early coordinates: the last node influences no observed row at all, so
its recovered value is arbitrary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import as_rng, check_fitness_values
from .estimation import estimate_parameters
from .likelihood import LikelihoodState
from .matrix import AttributeMatrix
from .model import ModelParams

__all__ = ["McmcConfig", "McmcTrace", "recover_fitness", "recover_fitness_normalized", "FitnessRecovery"]

_RESAMPLE_CAP = 100  # positive-proposal rejection attempts before falling back to |h|


@dataclass(frozen=True)
class McmcConfig:
    """Algorithm parameters.

    sigma2        proposal variance of the Gaussian jumps
    n_candidates  proposals scored per iteration (J)
    r_init        initial fitness guess: scalar fill or full vector
    tol           stopping threshold on the single-step gain (t)
    window        trailing iteration count examined by the stopping rule
                  (default 5 * n)
    k_n           restrict proposals to the first k_n coordinates (default n)
    max_iter      hard iteration cap (default 500 * n)
    bounds        optional (lo, hi) support restriction for proposals
    seed          RNG seed
    """

    sigma2: float = 1.0
    n_candidates: int = 4
    r_init: float | np.ndarray = 1.0
    tol: float = 0.25
    window: int | None = None
    k_n: int | None = None
    max_iter: int | None = None
    bounds: tuple[float, float] | None = None
    seed: object = None

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")
        if self.bounds is not None and not 0 < self.bounds[0] <= self.bounds[1]:
            raise ValueError("bounds must satisfy 0 < lo <= hi")

    def resolve(self, n: int):
        k_n = n if self.k_n is None else int(self.k_n)
        if not 1 <= k_n <= n:
            raise ValueError(f"k_n must lie in [1, {n}]")
        window = 5 * n if self.window is None else int(self.window)
        max_iter = 500 * n if self.max_iter is None else int(self.max_iter)
        return k_n, window, max_iter


@dataclass
class McmcTrace:
    """Outcome of a run: nondecreasing objective values plus the final vector."""

    objective: np.ndarray  # log-likelihood after each iteration (index 0 = start)
    r: np.ndarray  # recovered vector (first k_n entries are the estimate)
    accepted: int
    n_iter: int
    converged: bool
    k_n: int
    log_likelihood: float
    beta_hat: float | None = None
    alpha_prime_hat: float | None = None

    @property
    def r_hat(self) -> np.ndarray:
        """The k_n-prefix the algorithm actually optimised."""
        return self.r[: self.k_n]


def _draw_positive(rng, centre: float, sigma: float, bounds) -> float:
    lo, hi = bounds if bounds is not None else (0.0, np.inf)
    for _ in range(_RESAMPLE_CAP):
        h = centre + sigma * rng.standard_normal()
        if h > 0 and lo <= h <= hi:
            return h
    h = abs(centre + sigma * rng.standard_normal())
    if bounds is not None:
        h = min(max(h, lo), hi)
    return h if h > 0 else centre


def recover_fitness(
    matrix: AttributeMatrix, params: ModelParams, config: McmcConfig = McmcConfig()
) -> McmcTrace:
    """Run the coordinate-maximisation chain on an observed matrix."""
    n = matrix.n
    k_n, window, max_iter = config.resolve(n)
    rng = as_rng(config.seed)

    if np.isscalar(config.r_init):
        r0 = np.full(n, float(config.r_init), dtype=np.float64)
    else:
        r0 = check_fitness_values(config.r_init, n).copy()
    state = LikelihoodState(matrix, r0, params)

    objective = [state.log_value]
    accepted = 0
    it = 0
    last_gain_at = 0
    sigma = float(np.sqrt(config.sigma2))

    # nothing to optimise: a single row depends on no fitness value
    live = n > 1 and not state.impossible
    stopped_by_window = False
    while live and it < max_iter:
        i = int(rng.integers(k_n))
        cand = np.array(
            [
                _draw_positive(rng, state.r[i], sigma, config.bounds)
                for _ in range(config.n_candidates)
            ]
        )
        gains = state.delta(i, cand)
        best = int(np.argmax(gains))
        it += 1
        gain = float(gains[best])
        if gain > 0.0:  # exact ties keep the incumbent
            state.apply(i, float(cand[best]), delta_value=gain)
            accepted += 1
        else:
            gain = 0.0
        objective.append(state.log_value)
        if gain >= config.tol:
            last_gain_at = it
        if it - last_gain_at >= window:
            stopped_by_window = True
            break

    return McmcTrace(
        objective=np.asarray(objective),
        r=state.r.copy(),
        accepted=accepted,
        n_iter=it,
        converged=(not live) or stopped_by_window,
        k_n=k_n,
        log_likelihood=state.log_value,
    )


def recover_fitness_normalized(
    matrix: AttributeMatrix, config: McmcConfig = McmcConfig(), c: float = 0.0
) -> McmcTrace:
    """Estimate (beta, alpha') from the growth curve, then recover fitness.

    When the mean fitness is unknown the likelihood is invariant under
    jointly rescaling the fitness vector by its mean and alpha accordingly,
    so the chain run with alpha' recovers the mean-normalised vector r/m.
    The returned trace carries ``beta_hat`` and ``alpha_prime_hat``; its
    ``r``/``r_hat`` are the normalised values.
    """
    est = estimate_parameters(matrix)
    beta_used = min(max(est.beta_hat, 0.0), 1.0)
    alpha_prime = est.alpha_prime_hat
    if alpha_prime <= 0:
        raise ValueError(
            f"estimated alpha' = {alpha_prime:.4g} is not positive; "
            "the matrix growth curve does not look like this model"
        )
    params = ModelParams(alpha=alpha_prime, beta=beta_used, c=c)
    trace = recover_fitness(matrix, params, config)
    trace.beta_hat = est.beta_hat
    trace.alpha_prime_hat = alpha_prime
    return trace


class FitnessRecovery(BaseEstimator):
    """scikit-learn style wrapper around the recovery chain.

    With ``alpha``/``beta`` given, runs the chain under those parameters;
    otherwise estimates (beta, alpha') from the growth curve first and
    recovers the mean-normalised fitness vector.

    Attributes (after ``fit``)
    --------------------------
    r_ : np.ndarray           recovered (possibly normalised) fitness values
    trace_ : McmcTrace        full run record, objective curve included
    n_iter_ : int
    converged_ : bool
    beta_ / alpha_prime_ :    estimates, when they were needed
    """

    def __init__(
        self,
        alpha=None,
        beta=None,
        c=0.0,
        sigma2=1.0,
        n_candidates=4,
        r_init=1.0,
        tol=0.25,
        window=None,
        k_n=None,
        max_iter=None,
        bounds=None,
        random_state=None,
    ):
        self.alpha = alpha
        self.beta = beta
        self.c = c
        self.sigma2 = sigma2
        self.n_candidates = n_candidates
        self.r_init = r_init
        self.tol = tol
        self.window = window
        self.k_n = k_n
        self.max_iter = max_iter
        self.bounds = bounds
        self.random_state = random_state

    def _config(self) -> McmcConfig:
        return McmcConfig(
            sigma2=self.sigma2,
            n_candidates=self.n_candidates,
            r_init=self.r_init,
            tol=self.tol,
            window=self.window,
            k_n=self.k_n,
            max_iter=self.max_iter,
            bounds=self.bounds,
            seed=self.random_state,
        )

    def fit(self, X: AttributeMatrix, y=None):
        config = self._config()
        if (self.alpha is None) != (self.beta is None):
            raise ValueError("give both alpha and beta, or neither")
        if self.alpha is None:
            trace = recover_fitness_normalized(X, config, c=self.c)
            self.beta_ = trace.beta_hat
            self.alpha_prime_ = trace.alpha_prime_hat
        else:
            params = ModelParams(self.alpha, self.beta, self.c)
            trace = recover_fitness(X, params, config)
        self.trace_ = trace
        self.r_ = trace.r_hat.copy()
        self.n_iter_ = trace.n_iter
        self.converged_ = trace.converged
        self.objective_ = trace.log_likelihood
        return self
