"""Scenario-specific likelihoods and conjugate nuisance updates.

Five observation models share the same latent step function ``theta(t)``:

* ``GAUSS_MEAN``   y_i  ~ N(theta(t_i), sigma2)
* ``POISSON_RATE`` y_i  ~ Poisson(exp(theta(t_i)))
* ``GAUSS_SCALE``  y_i  ~ N(mu, exp(theta(t_i)))
* ``AR1``          y_t  ~ N(phi0 + theta(t) * y_{t-1}, sigma2), conditional on y_1
* ``LINREG``       y_tj ~ N(beta0 + theta(t) * x_tj, sigma2)

The Poisson model uses a log link so the real-valued step function always
maps to a positive rate; jump heights are therefore on the log-rate scale.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .core import AtomConfiguration, Hyperparameters, TimeSeries, evaluate_step_on_states
from .errors import DataShapeError, DomainError, NumericError

__all__ = [
    "ScenarioKind",
    "ScenarioSpec",
    "loglik",
    "update_nuisance",
    "sample_observations",
]


class ScenarioKind(enum.Enum):
    GAUSS_MEAN = "gauss-mean"
    POISSON_RATE = "poisson"
    GAUSS_SCALE = "gauss-scale"
    AR1 = "ar1"
    LINREG = "linreg"


# Nuisance parameters sampled for each kind, besides the baseline level.
_NUISANCE_NAMES = {
    ScenarioKind.GAUSS_MEAN: ("sigma2",),
    ScenarioKind.POISSON_RATE: (),
    ScenarioKind.GAUSS_SCALE: ("mu",),
    ScenarioKind.AR1: ("phi0", "sigma2"),
    ScenarioKind.LINREG: ("beta0", "sigma2"),
}


@dataclass(frozen=True)
class ScenarioSpec:
    """Which observation model governs the data."""

    kind: ScenarioKind

    @classmethod
    def from_name(cls, name: str) -> "ScenarioSpec":
        try:
            return cls(ScenarioKind(name))
        except ValueError:
            raise DomainError(f"unknown scenario {name!r}") from None

    @property
    def nuisance_names(self) -> tuple[str, ...]:
        return _NUISANCE_NAMES[self.kind]

    def validate_data(self, data: TimeSeries) -> None:
        k = self.kind
        if k is ScenarioKind.LINREG:
            if data.covariates is None:
                raise DataShapeError("regression data needs a covariate column")
        elif data.covariates is not None:
            raise DataShapeError(f"{k.value} data must not carry covariates")
        if k is not ScenarioKind.LINREG and np.any(data.counts != 1):
            raise DataShapeError(f"{k.value} expects one observation per state")
        if k is ScenarioKind.POISSON_RATE:
            y = data.values
            if np.any(y < 0) or np.any(y != np.floor(y)):
                raise DataShapeError("count data must be non-negative integers")
        if k is ScenarioKind.AR1 and data.n < 2:
            raise DataShapeError("autoregression needs at least two states")

    def default_nuisance(self, data: TimeSeries) -> dict:
        """Reasonable starting values; overwritten by the first Gibbs sweep."""
        y = data.values
        var = float(np.var(y)) if y.size > 1 else 1.0
        k = self.kind
        if k is ScenarioKind.GAUSS_MEAN:
            return {"sigma2": max(var, 1e-8)}
        if k is ScenarioKind.POISSON_RATE:
            return {}
        if k is ScenarioKind.GAUSS_SCALE:
            return {"mu": float(np.mean(y))}
        if k is ScenarioKind.AR1:
            return {"phi0": 0.0, "sigma2": max(var, 1e-8)}
        return {"beta0": float(np.mean(y)), "sigma2": max(var, 1e-8)}

    def initial_baseline(self, data: TimeSeries) -> float:
        """Global data summary used to start the chain at a no-change model."""
        y = data.values
        k = self.kind
        if k is ScenarioKind.GAUSS_MEAN:
            return float(np.mean(y))
        if k is ScenarioKind.POISSON_RATE:
            return float(np.log(max(np.mean(y), 1e-8)))
        if k is ScenarioKind.GAUSS_SCALE:
            return float(np.log(max(np.var(y), 1e-8)))
        return 0.0


def _require_finite(*values) -> None:
    for v in values:
        if not np.all(np.isfinite(v)):
            raise NumericError("non-finite parameter or step value in likelihood")


def loglik(spec: ScenarioSpec, config: AtomConfiguration, data: TimeSeries) -> float:
    """Total log-likelihood of the data under the configuration."""
    spec.validate_data(data)
    theta = evaluate_step_on_states(config, data.states)
    nu = config.nuisance
    _require_finite(theta, list(nu.values()))
    k = spec.kind
    y = data.values

    if k is ScenarioKind.GAUSS_MEAN:
        return float(np.sum(stats.norm.logpdf(y, theta, math.sqrt(nu["sigma2"]))))
    if k is ScenarioKind.POISSON_RATE:
        rate = np.exp(theta)
        if not np.all(np.isfinite(rate)):
            raise NumericError("rate overflow in count model")
        return float(np.sum(stats.poisson.logpmf(y.astype(np.int64), rate)))
    if k is ScenarioKind.GAUSS_SCALE:
        return float(np.sum(stats.norm.logpdf(y, nu["mu"], np.exp(theta / 2.0))))
    if k is ScenarioKind.AR1:
        mean = nu["phi0"] + theta[1:] * y[:-1]
        return float(np.sum(stats.norm.logpdf(y[1:], mean, math.sqrt(nu["sigma2"]))))
    # LINREG: observations are grouped by state
    per_obs_theta = np.repeat(theta, data.counts)
    mean = nu["beta0"] + per_obs_theta * data.covariates
    return float(np.sum(stats.norm.logpdf(y, mean, math.sqrt(nu["sigma2"]))))


def _draw_inv_gamma(shape: float, scale: float, rng: np.random.Generator) -> float:
    # X ~ InverseGamma(shape, scale) iff 1/X ~ Gamma(shape, 1/scale)
    return float(1.0 / rng.gamma(shape, 1.0 / scale))


def _draw_conjugate_normal(residual_sum: float, design_sq_sum: float, sigma2: float,
                           prior_sd: float, rng: np.random.Generator) -> float:
    prec = design_sq_sum / sigma2 + 1.0 / prior_sd**2
    mean = (residual_sum / sigma2) / prec
    return float(rng.normal(mean, math.sqrt(1.0 / prec)))


def update_nuisance(spec: ScenarioSpec, config: AtomConfiguration, data: TimeSeries,
                    rng: np.random.Generator,
                    hyper: Hyperparameters | None = None) -> AtomConfiguration:
    """Resample the nuisance block from its full conditional.

    Variances use the conjugate inverse-gamma update given current residuals;
    location-type parameters use conjugate normal updates given the variance.
    All step-function fields are left untouched.
    """
    spec.validate_data(data)
    hyper = hyper or Hyperparameters()
    theta = evaluate_step_on_states(config, data.states)
    nu = dict(config.nuisance)
    k = spec.kind
    y = data.values

    if k is ScenarioKind.GAUSS_MEAN:
        resid = y - theta
        nu["sigma2"] = _draw_inv_gamma(hyper.sigma2_shape + y.size / 2.0,
                                       hyper.sigma2_scale + np.sum(resid**2) / 2.0, rng)
    elif k is ScenarioKind.GAUSS_SCALE:
        # heteroscedastic conjugate normal: per-point precision exp(-theta)
        w = np.exp(-theta)
        prec = float(np.sum(w)) + 1.0 / hyper.coef_prior_sd**2
        mean = float(np.sum(y * w)) / prec
        nu["mu"] = float(rng.normal(mean, math.sqrt(1.0 / prec)))
    elif k is ScenarioKind.AR1:
        resid = y[1:] - nu["phi0"] - theta[1:] * y[:-1]
        nu["phi0"] = _draw_conjugate_normal(float(np.sum(resid + nu["phi0"])),
                                            float(y.size - 1), nu["sigma2"],
                                            hyper.coef_prior_sd, rng)
        resid = y[1:] - nu["phi0"] - theta[1:] * y[:-1]
        nu["sigma2"] = _draw_inv_gamma(hyper.sigma2_shape + (y.size - 1) / 2.0,
                                       hyper.sigma2_scale + np.sum(resid**2) / 2.0, rng)
    elif k is ScenarioKind.LINREG:
        per_obs_theta = np.repeat(theta, data.counts)
        x = data.covariates
        resid = y - nu["beta0"] - per_obs_theta * x
        nu["beta0"] = _draw_conjugate_normal(float(np.sum(resid + nu["beta0"])),
                                             float(y.size), nu["sigma2"],
                                             hyper.coef_prior_sd, rng)
        resid = y - nu["beta0"] - per_obs_theta * x
        nu["sigma2"] = _draw_inv_gamma(hyper.sigma2_shape + y.size / 2.0,
                                       hyper.sigma2_scale + np.sum(resid**2) / 2.0, rng)
    return replace(config, nuisance=nu)


def sample_observations(spec: ScenarioSpec, theta: np.ndarray, nuisance: dict,
                        rng: np.random.Generator,
                        template: TimeSeries) -> np.ndarray:
    """Draw a fresh observation vector given the step values on the states.

    The autoregressive model conditions on the first observation, which is
    therefore copied from the template rather than redrawn.
    """
    k = spec.kind
    if k is ScenarioKind.GAUSS_MEAN:
        return rng.normal(theta, math.sqrt(nuisance["sigma2"]))
    if k is ScenarioKind.POISSON_RATE:
        return rng.poisson(np.exp(theta)).astype(np.float64)
    if k is ScenarioKind.GAUSS_SCALE:
        return rng.normal(nuisance["mu"], np.exp(theta / 2.0))
    if k is ScenarioKind.AR1:
        y = np.empty(theta.size)
        y[0] = template.values[0]
        sd = math.sqrt(nuisance["sigma2"])
        for t in range(1, theta.size):
            y[t] = nuisance["phi0"] + theta[t] * y[t - 1] + rng.normal(0.0, sd)
        return y
    per_obs_theta = np.repeat(theta, template.counts)
    mean = nuisance["beta0"] + per_obs_theta * template.covariates
    return rng.normal(mean, math.sqrt(nuisance["sigma2"]))
