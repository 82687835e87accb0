"""Domain types and pure step-function mathematics.

The detector models a piecewise-constant signal as a baseline level plus a
truncated sum of atoms: each atom has a continuous location ``xi`` in
``(0, n)``, a jump height, and a binary inclusion indicator.  Inclusion
probabilities follow stick-breaking weights (cumulative products of Beta
variables) governed by a Gamma-distributed concentration ``alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError

__all__ = [
    "TimeSeries",
    "AtomConfiguration",
    "Slab",
    "McmcSettings",
    "Hyperparameters",
    "evaluate_step",
    "evaluate_step_on_states",
    "stick_weights",
    "truncation_tail_bound",
    "sample_prior_configuration",
]


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Observed data stream indexed by strictly increasing integer states.

    ``values`` holds all observations grouped by state; ``counts[i]`` gives
    the number of observations at ``states[i]`` (one except for grouped
    regression data).  ``covariates`` aligns with ``values`` and is only
    present for regression scenarios.
    """

    states: np.ndarray
    values: np.ndarray
    counts: np.ndarray
    covariates: np.ndarray | None = None

    def __post_init__(self):
        states = np.asarray(self.states, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "counts", counts)
        if self.covariates is not None:
            cov = np.asarray(self.covariates, dtype=np.float64)
            object.__setattr__(self, "covariates", cov)
            if cov.shape != values.shape:
                raise DomainError("covariates must align with values")
        if states.ndim != 1 or states.size == 0:
            raise DomainError("states must be a non-empty 1-d sequence")
        if np.any(np.diff(states) <= 0):
            raise DomainError("states must be strictly increasing")
        if counts.shape != states.shape:
            raise DomainError("counts must align with states")
        if np.any(counts < 1):
            raise DomainError("every state needs at least one observation")
        if int(counts.sum()) != values.size:
            raise DomainError("values length inconsistent with counts")

    @classmethod
    def from_values(cls, values, states=None) -> "TimeSeries":
        """Build a one-observation-per-state series, states defaulting to 1..n."""
        values = np.asarray(values, dtype=np.float64)
        if states is None:
            states = np.arange(1, values.size + 1)
        return cls(states=np.asarray(states), values=values,
                   counts=np.ones(values.size, dtype=np.int64))

    @classmethod
    def from_pairs(cls, states, values, covariates) -> "TimeSeries":
        """Build a grouped series from per-observation (state, y, x) columns.

        ``states`` may repeat; observations are grouped by state in order.
        """
        states = np.asarray(states, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        covariates = np.asarray(covariates, dtype=np.float64)
        if not (states.shape == values.shape == covariates.shape):
            raise DomainError("state, value and covariate columns must align")
        order = np.argsort(states, kind="stable")
        states, values, covariates = states[order], values[order], covariates[order]
        uniq, counts = np.unique(states, return_counts=True)
        return cls(states=uniq, values=values, counts=counts, covariates=covariates)

    @property
    def n(self) -> int:
        """Number of distinct states."""
        return int(self.states.size)

    @property
    def obs_offsets(self) -> np.ndarray:
        """CSR-style offsets: observations of state ``i`` live in
        ``values[obs_offsets[i]:obs_offsets[i + 1]]``."""
        return np.concatenate(([0], np.cumsum(self.counts)))


@dataclass(frozen=True, eq=False)
class Slab:
    """Continuous density for non-zero jump heights.

    ``cauchy`` is the standard Cauchy; ``laplace`` is zero-centred with
    precision ``lam`` (density ``lam/2 * exp(-lam * |h|)``).
    """

    kind: str = "cauchy"
    lam: float = 1.0

    def __post_init__(self):
        if self.kind not in ("cauchy", "laplace"):
            raise DomainError(f"unknown slab kind {self.kind!r}")
        if self.kind == "laplace" and not self.lam > 0:
            raise DomainError("laplace slab needs lam > 0")

    def logpdf(self, h: float) -> float:
        if self.kind == "cauchy":
            return -np.log(np.pi) - np.log1p(h * h)
        return np.log(self.lam / 2.0) - self.lam * abs(h)

    def sample(self, rng: np.random.Generator, size=None):
        if self.kind == "cauchy":
            return rng.standard_cauchy(size)
        return rng.laplace(0.0, 1.0 / self.lam, size)


@dataclass(frozen=True)
class McmcSettings:
    chains: int = 4
    iterations: int = 28000
    burn_in: int = 8000
    thinning: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.chains < 1:
            raise DomainError("chains must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise DomainError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.thinning < 1:
            raise DomainError("thinning must be >= 1")

    @property
    def retained_per_chain(self) -> int:
        return (self.iterations - self.burn_in) // self.thinning


@dataclass(frozen=True, eq=False)
class Hyperparameters:
    """Sampler and prior configuration.

    ``L`` is the truncation (maximum number of atoms), ``D`` the prior belief
    on the minimum distance between change-points.  ``a`` and ``b`` are the
    shape and scale of the Gamma hyperprior on the concentration ``alpha``.
    The nuisance-prior constants are weakly informative conjugate defaults:
    variances get InverseGamma(sigma2_shape, sigma2_scale), location-type
    nuisance parameters and the baseline get zero-mean normal priors.
    """

    L: int = 25
    D: int = 15
    a: float = 2.0
    b: float = 50.0
    slab: Slab = field(default_factory=Slab)
    mcmc: McmcSettings = field(default_factory=McmcSettings)
    sigma2_shape: float = 0.01
    sigma2_scale: float = 0.01
    coef_prior_sd: float = 10.0
    baseline_prior_sd: float = 10.0

    def __post_init__(self):
        if self.L < 1:
            raise DomainError("L must be >= 1")
        if self.D < 1:
            raise DomainError("D must be >= 1")
        if not (self.a > 0 and self.b > 0):
            raise DomainError("a and b must be positive")
        if not (self.sigma2_shape > 0 and self.sigma2_scale > 0):
            raise DomainError("sigma2 prior constants must be positive")
        if not (self.coef_prior_sd > 0 and self.baseline_prior_sd > 0):
            raise DomainError("prior standard deviations must be positive")

    def with_mcmc(self, **kwargs) -> "Hyperparameters":
        return replace(self, mcmc=replace(self.mcmc, **kwargs))


@dataclass(frozen=True, eq=False)
class AtomConfiguration:
    """One latent state of the sampler.

    Arrays all have length ``L``; ``indicators[l] == 0`` forces
    ``heights[l] == 0``.  ``nuisance`` holds scenario-specific parameters
    (for instance ``sigma2``) keyed by name.
    """

    xi: np.ndarray
    heights: np.ndarray
    indicators: np.ndarray
    sticks: np.ndarray
    alpha: float
    baseline: float = 0.0
    nuisance: dict = field(default_factory=dict)

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=np.float64)
        heights = np.asarray(self.heights, dtype=np.float64)
        indicators = np.asarray(self.indicators, dtype=np.int64)
        sticks = np.asarray(self.sticks, dtype=np.float64)
        for name, arr in (("xi", xi), ("heights", heights),
                          ("indicators", indicators), ("sticks", sticks)):
            object.__setattr__(self, name, arr)
            if arr.shape != xi.shape:
                raise DomainError(f"{name} must have the same length as xi")
        if np.any((indicators != 0) & (indicators != 1)):
            raise DomainError("indicators must be binary")
        if np.any((indicators == 0) & (heights != 0.0)):
            raise DomainError("excluded atoms must have zero height")
        if np.any(sticks <= 0.0) or np.any(sticks >= 1.0):
            raise DomainError("sticks must lie in the open interval (0, 1)")
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")

    @property
    def L(self) -> int:
        return int(self.xi.size)

    @property
    def n_active(self) -> int:
        return int(self.indicators.sum())


def evaluate_step(config: AtomConfiguration, t: float) -> float:
    """Evaluate the step function at ``t``.

    Returns ``baseline + sum of heights of atoms with xi <= t``; the result is
    piecewise constant and right-continuous in ``t``.
    """
    active = config.xi <= t
    return float(config.baseline + np.sum(config.heights[active]))


def evaluate_step_on_states(config: AtomConfiguration, states) -> np.ndarray:
    """Vectorised :func:`evaluate_step` over an increasing state grid."""
    states = np.asarray(states, dtype=np.float64)
    theta = np.full(states.size, config.baseline, dtype=np.float64)
    for x, h in zip(config.xi, config.heights):
        if h != 0.0:
            theta[states >= x] += h
    return theta


def stick_weights(sticks) -> np.ndarray:
    """Cumulative products of stick variables; non-increasing by construction."""
    sticks = np.asarray(sticks, dtype=np.float64)
    if np.any(sticks <= 0.0) or np.any(sticks > 1.0):
        raise DomainError("stick entries must lie in (0, 1]")
    return np.cumprod(sticks)


def truncation_tail_bound(a: float, b: float) -> float:
    """Upper bound on the summed expected inclusion weights of all atoms.

    Under sticks with concentration ``alpha ~ Gamma(a, scale=b)`` the expected
    weights sum to at most ``a * b``, which justifies truncating the atom
    sequence once the bound is small relative to the tolerated number of
    spurious jumps.
    """
    if not (a > 0 and b > 0):
        raise DomainError("a and b must be positive")
    return a * b


def sample_prior_configuration(hyper: Hyperparameters, n: int,
                               rng: np.random.Generator,
                               nuisance: dict | None = None) -> AtomConfiguration:
    """Draw atoms, sticks and heights from their joint prior."""
    alpha = rng.gamma(hyper.a, hyper.b)
    sticks = np.clip(rng.beta(max(alpha, 1e-300), 1.0, hyper.L), 1e-300, 1.0 - 1e-12)
    eta = np.cumprod(sticks)
    indicators = (rng.random(hyper.L) < eta).astype(np.int64)
    heights = np.where(indicators == 1, hyper.slab.sample(rng, hyper.L), 0.0)
    xi = rng.uniform(0.0, n, hyper.L)
    baseline = rng.normal(0.0, hyper.baseline_prior_sd)
    return AtomConfiguration(xi=xi, heights=heights, indicators=indicators,
                             sticks=sticks, alpha=max(float(alpha), 1e-300),
                             baseline=float(baseline),
                             nuisance=dict(nuisance or {}))
