"""MCMC engine: latent-state moves, single chains, and multi-chain runs.

The sweep order is sticks, concentration, jump heights (reversible-jump
birth/death plus a random-walk refresh), locations, nuisance block, and
baseline.  Proposal scales adapt towards 44% acceptance during burn-in and
are frozen afterwards so retained draws come from a fixed Markov kernel.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _engine as eng
from .core import (AtomConfiguration, Hyperparameters, TimeSeries,
                   evaluate_step_on_states)
from .errors import ChainDivergedError, DataShapeError, DomainError, NumericError
from .scenarios import ScenarioKind, ScenarioSpec

__all__ = [
    "PosteriorDraws",
    "ChainSampler",
    "alpha_conditional",
    "gibbs_alpha",
    "update_sticks",
    "rj_update_heights",
    "mh_update_locations",
    "run_chain",
    "run_chains",
]

_KIND_CODE = {
    None: eng.FLAT,
    ScenarioKind.GAUSS_MEAN: eng.GAUSS_MEAN,
    ScenarioKind.POISSON_RATE: eng.POISSON,
    ScenarioKind.GAUSS_SCALE: eng.GAUSS_SCALE,
    ScenarioKind.AR1: eng.AR1,
    ScenarioKind.LINREG: eng.LINREG,
}

_PHASE_NAMES = {
    1: "update_sticks",
    2: "gibbs_alpha",
    3: "rj_update_heights",
    4: "mh_update_locations",
    5: "update_nuisance",
    6: "update_baseline",
}

_MOVE_NAMES = ("birth", "death", "height_rw", "location_rw", "baseline_rw")


@dataclass(eq=False)
class PosteriorDraws:
    """Retained posterior samples from one or several chains."""

    theta: np.ndarray
    alpha: np.ndarray
    n_active: np.ndarray
    baseline: np.ndarray
    nuisance: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    @property
    def n_draws(self) -> int:
        return int(self.theta.shape[0])

    @property
    def n_states(self) -> int:
        return int(self.theta.shape[1])

    def theta_by_chain(self) -> list[np.ndarray]:
        sizes = self.meta.get("chain_sizes", [self.n_draws])
        out, start = [], 0
        for s in sizes:
            out.append(self.theta[start:start + s])
            start += s
        return out


def _acceptance_rates(counts: np.ndarray) -> dict[str, float]:
    rates = {}
    for i, name in enumerate(_MOVE_NAMES):
        hits, total = int(counts[2 * i]), int(counts[2 * i + 1])
        rates[name] = hits / total if total else float("nan")
    return rates


class ChainSampler:
    """Mutable sampler state over one data set.

    Wraps the compiled kernels; all latent state lives in flat arrays so a
    sweep costs microseconds.  Passing ``spec=None`` disables the data term
    entirely, which turns the chain into a sampler of the prior.
    """

    def __init__(self, data: TimeSeries, spec: ScenarioSpec | None,
                 hyper: Hyperparameters, seed: int,
                 config: AtomConfiguration | None = None):
        if spec is not None:
            spec.validate_data(data)
        self.data = data
        self.spec = spec
        self.hyper = hyper
        self.kind = _KIND_CODE[spec.kind if spec is not None else None]
        self.states = data.states.astype(np.float64)
        self.n = data.n
        self.domain = float(self.states[-1])

        ss = np.random.SeedSequence(seed)
        init_ss, kernel_ss = ss.spawn(2)
        self._kernel_seed = int(kernel_ss.generate_state(1)[0])
        rng = np.random.default_rng(init_ss)

        L = config.L if config is not None else hyper.L
        self.L = L
        slab = hyper.slab
        self._slab_code = eng.SLAB_CAUCHY if slab.kind == "cauchy" else eng.SLAB_LAPLACE
        self._slab_lam = float(slab.lam)

        self._build_data_arrays()
        if config is None:
            config = self._null_start(rng)
        self._load_config(config)

        # proposal scales, adapted during burn-in only
        self.h_scale = np.ones(L)
        self.loc_scale = np.full(L, max(2.0, self.domain / 50.0))
        self.base_scale = np.array([0.1])
        self.acc = np.zeros(10, dtype=np.int64)
        eng.seed_rng(self._kernel_seed)

    # -- data plumbing -------------------------------------------------

    def _build_data_arrays(self):
        n = self.n
        y = self.data.values
        empty = np.empty(0, dtype=np.float64)
        self.obs_start = np.zeros(n + 1, dtype=np.int64)
        self.eng_y = empty
        self.eng_x = empty
        self.y_state = empty
        self.resid = empty
        self.ey = empty
        self.w = empty
        if self.kind in (eng.GAUSS_MEAN, eng.LINREG):
            self.eng_y = y.astype(np.float64).copy()
            if self.kind == eng.GAUSS_MEAN:
                self.eng_x = np.ones(n)
                self.obs_start = np.arange(n + 1, dtype=np.int64)
            else:
                self.eng_x = self.data.covariates.astype(np.float64).copy()
                self.obs_start = self.data.obs_offsets.astype(np.int64)
            self.resid = np.zeros(self.eng_y.size)
        elif self.kind == eng.AR1:
            self.eng_y = y[1:].astype(np.float64).copy()
            self.eng_x = y[:-1].astype(np.float64).copy()
            self.obs_start = np.concatenate(
                ([0], np.arange(n, dtype=np.int64))).astype(np.int64)
            self.resid = np.zeros(n - 1)
        elif self.kind == eng.POISSON:
            self.y_state = y.astype(np.float64).copy()
            self.ey = np.zeros(n)
        elif self.kind == eng.GAUSS_SCALE:
            self.y_state = y.astype(np.float64).copy()
            self.w = np.zeros(n)

    def set_observations(self, values) -> None:
        """Swap in fresh observations, keeping the latent state unchanged."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != self.data.values.shape:
            raise DataShapeError("replacement observations must match the original shape")
        self.data = replace(self.data, values=values)
        self._build_data_arrays()
        self._rebuild_caches()

    # -- configuration round-trips --------------------------------------

    def _null_start(self, rng: np.random.Generator) -> AtomConfiguration:
        """No-change starting point: all atoms excluded, baseline at a
        global data summary, sticks uniform, concentration at its prior mean."""
        hyper = self.hyper
        if self.spec is None:
            baseline, nuisance = 0.0, {}
        else:
            baseline = self.spec.initial_baseline(self.data)
            nuisance = self.spec.default_nuisance(self.data)
        sticks = np.clip(rng.random(self.L), 1e-12, 1.0 - 1e-12)
        return AtomConfiguration(
            xi=rng.uniform(0.0, self.domain, self.L),
            heights=np.zeros(self.L),
            indicators=np.zeros(self.L, dtype=np.int64),
            sticks=sticks,
            alpha=hyper.a * hyper.b,
            baseline=baseline,
            nuisance=nuisance,
        )

    def _load_config(self, config: AtomConfiguration):
        if config.L != self.L:
            raise DomainError("configuration truncation does not match sampler")
        self.xi = config.xi.astype(np.float64).copy()
        self.h = config.heights.astype(np.float64).copy()
        self.z = config.indicators.astype(np.int64).copy()
        self.sticks = config.sticks.astype(np.float64).copy()
        self.first = np.searchsorted(self.states, self.xi).astype(np.int64)
        nu = config.nuisance
        self.scalars = np.array([
            config.alpha,
            config.baseline,
            nu.get("phi0", nu.get("beta0", 0.0)),
            nu.get("sigma2", 1.0),
            nu.get("mu", 0.0),
        ])
        self.theta = evaluate_step_on_states(config, self.states)
        self._rebuild_caches()

    def _rebuild_caches(self):
        eng.rebuild_caches(self.kind, self.theta, self.scalars, self.eng_y,
                           self.eng_x, self.obs_start, self.y_state,
                           self.resid, self.ey, self.w)

    @property
    def config(self) -> AtomConfiguration:
        nu = {}
        if self.spec is not None:
            names = self.spec.nuisance_names
            if "sigma2" in names:
                nu["sigma2"] = float(self.scalars[eng.I_SIG2])
            if "mu" in names:
                nu["mu"] = float(self.scalars[eng.I_MU])
            if "phi0" in names:
                nu["phi0"] = float(self.scalars[eng.I_COEF])
            if "beta0" in names:
                nu["beta0"] = float(self.scalars[eng.I_COEF])
        return AtomConfiguration(
            xi=self.xi.copy(), heights=self.h.copy(), indicators=self.z.copy(),
            sticks=self.sticks.copy(), alpha=float(self.scalars[eng.I_ALPHA]),
            baseline=float(self.scalars[eng.I_BASE]), nuisance=nu)

    # -- individual moves (used by the one-shot wrappers and tests) -----

    def sticks_move(self):
        eng.update_sticks_inplace(self.sticks, self.z, self.scalars[eng.I_ALPHA])

    def alpha_move(self):
        self.scalars[eng.I_ALPHA] = eng.draw_alpha(self.sticks, self.hyper.a,
                                                   self.hyper.b)

    def heights_move(self, adapt=False, adapt_step=0.0):
        eng.rj_heights_inplace(self.kind, self._slab_code, self._slab_lam,
                               self.xi, self.h, self.z, self.first, self.sticks,
                               self.theta, self.resid, self.eng_x, self.obs_start,
                               self.y_state, self.ey, self.w,
                               self.scalars[eng.I_SIG2], self.h_scale, self.acc,
                               adapt, adapt_step)

    def locations_move(self, adapt=False, adapt_step=0.0):
        eng.mh_locations_inplace(self.kind, self.states, self.xi, self.h, self.z,
                                 self.first, self.theta, self.resid, self.eng_x,
                                 self.obs_start, self.y_state, self.ey, self.w,
                                 self.scalars[eng.I_SIG2], self.loc_scale,
                                 self.acc, adapt, adapt_step)

    def nuisance_move(self):
        eng.update_nuisance_inplace(self.kind, self.scalars, self.theta,
                                    self.resid, self.eng_x, self.obs_start,
                                    self.y_state, self.w, self.hyper.sigma2_shape,
                                    self.hyper.sigma2_scale, self.hyper.coef_prior_sd)

    def baseline_move(self, adapt=False, adapt_step=0.0):
        eng.update_baseline_inplace(self.kind, self.scalars, self.theta,
                                    self.resid, self.eng_x, self.obs_start,
                                    self.y_state, self.ey, self.w,
                                    self.hyper.baseline_prior_sd, self.base_scale,
                                    self.acc, adapt, adapt_step)

    def sweep(self, adapt=False, adapt_step=0.0) -> None:
        hyper = self.hyper
        code = eng.one_sweep(self.kind, self._slab_code, self._slab_lam,
                             self.states, self.eng_y, self.eng_x, self.obs_start,
                             self.y_state, self.theta, self.resid, self.ey, self.w,
                             self.xi, self.h, self.z, self.first, self.sticks,
                             self.scalars, self.h_scale, self.loc_scale,
                             self.base_scale, self.acc,
                             hyper.a, hyper.b, hyper.sigma2_shape,
                             hyper.sigma2_scale, hyper.coef_prior_sd,
                             hyper.baseline_prior_sd, adapt, adapt_step)
        if code != 0:
            raise ChainDivergedError(_PHASE_NAMES[code], -1)

    def run(self):
        """Run the configured number of iterations, returning retained draws."""
        hyper = self.hyper
        mc = hyper.mcmc
        retained = mc.retained_per_chain
        out_theta = np.empty((retained, self.n))
        out_alpha = np.empty(retained)
        out_nact = np.empty(retained, dtype=np.int64)
        out_scalars = np.empty((retained, 4))
        code, it, r = eng.run_chain_kernel(
            self._kernel_seed, mc.iterations, mc.burn_in, mc.thinning,
            self.kind, self._slab_code, self._slab_lam, self.states,
            self.eng_y, self.eng_x, self.obs_start, self.y_state,
            self.theta, self.resid, self.ey, self.w,
            self.xi, self.h, self.z, self.first, self.sticks, self.scalars,
            self.h_scale, self.loc_scale, self.base_scale, self.acc,
            hyper.a, hyper.b, hyper.sigma2_shape, hyper.sigma2_scale,
            hyper.coef_prior_sd, hyper.baseline_prior_sd,
            out_theta, out_alpha, out_nact, out_scalars)
        if code != 0:
            raise ChainDivergedError(_PHASE_NAMES[code], it)
        return out_theta[:r], out_alpha[:r], out_nact[:r], out_scalars[:r]


def alpha_conditional(sticks, a: float, b: float) -> tuple[float, float]:
    """Shape/scale of the exact Gamma full conditional of the concentration."""
    sticks = np.asarray(sticks, dtype=np.float64)
    if np.any(sticks <= 0.0):
        raise NumericError("stick at zero: log-divergent concentration update")
    rate = 1.0 / b - float(np.sum(np.log(sticks)))
    return a + sticks.size, 1.0 / rate


def gibbs_alpha(config: AtomConfiguration, hyper: Hyperparameters,
                rng: np.random.Generator) -> AtomConfiguration:
    """Resample the concentration from its exact Gamma full conditional."""
    shape, scale = alpha_conditional(config.sticks, hyper.a, hyper.b)
    return replace(config, alpha=float(rng.gamma(shape, scale)))


def update_sticks(config: AtomConfiguration, data: TimeSeries | None,
                  spec: ScenarioSpec | None,
                  rng: np.random.Generator) -> AtomConfiguration:
    """One slice-sampling scan over the stick variables.

    The stick conditionals depend on the indicators and concentration only,
    so the data and scenario are accepted purely for interface symmetry.
    """
    sticks = config.sticks.astype(np.float64).copy()
    eng.seed_rng(int(rng.integers(0, 2**32)))
    eng.update_sticks_inplace(sticks, config.indicators.astype(np.int64),
                              float(config.alpha))
    return replace(config, sticks=sticks)


def _one_shot_sampler(config, data, spec, hyper, rng) -> ChainSampler:
    cs = ChainSampler(data, spec, hyper, seed=int(rng.integers(0, 2**63)),
                      config=config)
    eng.seed_rng(int(rng.integers(0, 2**32)))
    return cs


def rj_update_heights(config: AtomConfiguration, data: TimeSeries,
                      spec: ScenarioSpec | None, hyper: Hyperparameters,
                      rng: np.random.Generator) -> AtomConfiguration:
    """One reversible-jump pass over all atoms (toggle plus refresh)."""
    cs = _one_shot_sampler(config, data, spec, hyper, rng)
    cs.heights_move()
    return cs.config


def mh_update_locations(config: AtomConfiguration, data: TimeSeries,
                        spec: ScenarioSpec | None,
                        rng: np.random.Generator,
                        hyper: Hyperparameters | None = None) -> AtomConfiguration:
    """One Metropolis pass over atom locations with reflecting bounds."""
    cs = _one_shot_sampler(config, data, spec, hyper or Hyperparameters(L=config.L),
                           rng)
    cs.locations_move()
    return cs.config


def run_chain(data: TimeSeries, spec: ScenarioSpec | None,
              hyper: Hyperparameters, chain_seed: int) -> PosteriorDraws:
    """Run one chain from the null start; deterministic given the seed."""
    if data.n < 4:
        raise DataShapeError("sampling needs at least four states")
    cs = ChainSampler(data, spec, hyper, seed=chain_seed)
    theta, alpha, n_active, scalars = cs.run()
    nuisance = {}
    if spec is not None:
        names = spec.nuisance_names
        if "phi0" in names:
            nuisance["phi0"] = scalars[:, 1]
        if "beta0" in names:
            nuisance["beta0"] = scalars[:, 1]
        if "sigma2" in names:
            nuisance["sigma2"] = scalars[:, 2]
        if "mu" in names:
            nuisance["mu"] = scalars[:, 3]
    mc = hyper.mcmc
    meta = {
        "chains": 1,
        "iterations": mc.iterations,
        "burn_in": mc.burn_in,
        "thinning": mc.thinning,
        "seed": chain_seed,
        "chain_sizes": [theta.shape[0]],
        "acceptance_counts": cs.acc.copy(),
        "acceptance": _acceptance_rates(cs.acc),
    }
    return PosteriorDraws(theta=theta, alpha=alpha, n_active=n_active,
                          baseline=scalars[:, 0], nuisance=nuisance, meta=meta)


def _chain_seeds(master_seed: int, chains: int) -> list[int]:
    return [int(child.generate_state(1)[0])
            for child in np.random.SeedSequence(master_seed).spawn(chains)]


def run_chains(data: TimeSeries, spec: ScenarioSpec | None,
               hyper: Hyperparameters, workers: int | None = None) -> PosteriorDraws:
    """Run all configured chains and concatenate their retained draws.

    Chains use seeds derived from ``hyper.mcmc.seed`` and results are merged
    in chain order, so the output is identical however the chains are
    scheduled.  ``workers`` defaults to the NOSE_THREADS environment
    variable, falling back to sequential execution.
    """
    seeds = _chain_seeds(hyper.mcmc.seed, hyper.mcmc.chains)
    if workers is None:
        workers = int(os.environ.get("NOSE_THREADS", "1") or 1)
    workers = max(1, min(workers, len(seeds)))
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chain, [data] * len(seeds),
                                  [spec] * len(seeds), [hyper] * len(seeds), seeds))
    else:
        parts = [run_chain(data, spec, hyper, s) for s in seeds]

    counts = np.sum([p.meta["acceptance_counts"] for p in parts], axis=0)
    meta = {
        "chains": len(parts),
        "iterations": hyper.mcmc.iterations,
        "burn_in": hyper.mcmc.burn_in,
        "thinning": hyper.mcmc.thinning,
        "seed": hyper.mcmc.seed,
        "chain_sizes": [p.n_draws for p in parts],
        "acceptance_counts": counts,
        "acceptance": _acceptance_rates(counts),
    }
    nuisance = {k: np.concatenate([p.nuisance[k] for p in parts])
                for k in parts[0].nuisance}
    return PosteriorDraws(
        theta=np.concatenate([p.theta for p in parts], axis=0),
        alpha=np.concatenate([p.alpha for p in parts]),
        n_active=np.concatenate([p.n_active for p in parts]),
        baseline=np.concatenate([p.baseline for p in parts]),
        nuisance=nuisance, meta=meta)
