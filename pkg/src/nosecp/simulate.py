"""Synthetic data generators for the benchmark settings.

Each setting produces a data stream whose ground truth is known exactly; a
change-point is the last state of its segment, so segment ``k`` covers the
states ``(tau[k-1], tau[k]]``.  Constants live in :data:`SETTINGS` so the
whole catalogue can be audited (and corrected) in one place.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .core import TimeSeries
from .errors import DomainError
from .scenarios import ScenarioKind

__all__ = ["GroundTruth", "SETTINGS", "generate"]


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """True change-points and per-segment parameter values."""

    changepoints: np.ndarray
    segment_values: np.ndarray
    n: int
    kind: ScenarioKind

    def __post_init__(self):
        cps = np.asarray(self.changepoints, dtype=np.int64)
        vals = np.asarray(self.segment_values, dtype=np.float64)
        object.__setattr__(self, "changepoints", cps)
        object.__setattr__(self, "segment_values", vals)
        if cps.size and not (0 < cps[0] and cps[-1] < self.n
                             and np.all(np.diff(cps) > 0)):
            raise DomainError("change-points must be increasing and interior")
        if vals.size != cps.size + 1:
            raise DomainError("need one segment value per segment")
        if np.any(np.diff(vals) == 0.0):
            raise DomainError("adjacent segment values must differ")

    @property
    def k(self) -> int:
        return int(self.changepoints.size)


# Printed constants for every setting.  MEAN_SHIFT_TAU/MU are shared by the
# plain and misspecified mean-shift settings.
_MEAN_SHIFT_TAU = (50, 100, 150, 200, 250, 300, 350)
_MEAN_SHIFT_MU = (0.0, 1.5, 3.0, 1.5, 3.0, 0.5, 2.0, 0.0)

SETTINGS = {
    "S1": dict(kind=ScenarioKind.GAUSS_MEAN, n=400, tau=_MEAN_SHIFT_TAU,
               values=_MEAN_SHIFT_MU, sigma=np.sqrt(2.0)),
    "S2": dict(kind=ScenarioKind.GAUSS_MEAN, n=916,
               tau=(81, 134, 178, 267, 346, 413, 528, 577, 636, 741, 822),
               values=(0.0, 1.23, -0.248, 0.861, -0.534, 1.057, 0.369, 1.331,
                       0.483, 1.105, -1.101, 0.0),
               sigma=1.0),
    "S3": dict(kind=ScenarioKind.POISSON_RATE, n=400, tau=_MEAN_SHIFT_TAU,
               values=(1.0, 0.25, 2.0, 1.0, 3.0, 1.5, 2.5, 1.0)),
    "S4": dict(kind=ScenarioKind.GAUSS_SCALE, n=756,
               tau=(150, 250, 300, 450, 550, 650, 700),
               values=(1.0, 1.68, 0.57, 0.20, 2.18, 3.09, 1.83, 1.0),
               means=(0.056, 0.047, -0.034, -0.017, 0.032, 0.068, -0.042, 0.017)),
    "S5": dict(kind=ScenarioKind.AR1, n=450, tau=(50, 100, 200, 300, 400),
               values=(0.5, -0.5, 0.65, -0.25, -0.85, 0.45),
               intercept=0.0, sigma=1.0),
    "S6": dict(kind=ScenarioKind.LINREG, n=240, tau=(40, 80, 120, 160, 200),
               values=(1.0, -1.0, 0.5, -0.5, 1.0, -1.0),
               intercept=0.5, sigma=1.0, replicates=2, x_range=(-2.0, 2.0)),
    "MS1": dict(kind=ScenarioKind.GAUSS_MEAN, n=400, tau=_MEAN_SHIFT_TAU,
                values=_MEAN_SHIFT_MU, noise="student_t4"),
    "MS2": dict(kind=ScenarioKind.GAUSS_MEAN, n=400, tau=_MEAN_SHIFT_TAU,
                values=_MEAN_SHIFT_MU, noise="ar1", noise_coef=0.5),
    "MS3": dict(kind=ScenarioKind.AR1, n=450, tau=(50, 100, 200, 300, 400),
                values=(0.5, -0.5, 0.65, -0.25, -0.85, 0.45),
                lag2=(0.0, 0.0, 0.35, 0.0, -0.35, 0.0), sigma=1.0),
    "DRAIP_SIM": dict(kind=ScenarioKind.GAUSS_SCALE, n=756,
                      tau=(37, 137, 206, 336, 426, 510, 630),
                      values=(1.173, 1.369, 1.873, 3.500, 2.570, 5.863, 2.426,
                              1.599),
                      means=(0.141, 0.124, 0.399, 0.214, -0.112, -0.093,
                             -0.053, 0.116)),
}


def _per_state(n: int, tau, values) -> np.ndarray:
    bounds = np.concatenate(([0], np.asarray(tau, dtype=np.int64), [n]))
    return np.repeat(np.asarray(values, dtype=np.float64), np.diff(bounds))


def generate(setting: str, seed: int) -> tuple[TimeSeries, GroundTruth]:
    """Generate one replicate of a named setting; deterministic given the seed."""
    key = setting.upper().replace(".", "").replace("-", "_")
    if key not in SETTINGS:
        raise DomainError(f"unknown setting {setting!r}; choose from "
                          f"{sorted(SETTINGS)}")
    cfg = SETTINGS[key]
    # crc of the name decorrelates streams across settings at equal seeds
    rng = np.random.default_rng(np.random.SeedSequence([zlib.crc32(key.encode()), seed]))
    n = cfg["n"]
    tau = np.asarray(cfg["tau"], dtype=np.int64)
    values = np.asarray(cfg["values"], dtype=np.float64)
    kind = cfg["kind"]
    truth = GroundTruth(changepoints=tau, segment_values=values, n=n, kind=kind)

    if kind is ScenarioKind.GAUSS_MEAN:
        mu = _per_state(n, tau, values)
        noise_type = cfg.get("noise")
        if noise_type == "student_t4":
            eps = rng.standard_t(4, n) / np.sqrt(2.0)
        elif noise_type == "ar1":
            innov = rng.normal(0.0, 1.0, n)
            eps = np.empty(n)
            eps[0] = innov[0]
            rho = cfg["noise_coef"]
            for t in range(1, n):
                eps[t] = rho * eps[t - 1] + innov[t]
        else:
            eps = rng.normal(0.0, cfg["sigma"], n)
        return TimeSeries.from_values(mu + eps), truth

    if kind is ScenarioKind.POISSON_RATE:
        rate = _per_state(n, tau, values)
        return TimeSeries.from_values(rng.poisson(rate).astype(np.float64)), truth

    if kind is ScenarioKind.GAUSS_SCALE:
        sd = _per_state(n, tau, values)
        mu = _per_state(n, tau, cfg["means"])
        return TimeSeries.from_values(rng.normal(mu, sd)), truth

    if kind is ScenarioKind.AR1:
        phi1 = _per_state(n, tau, values)
        phi2 = _per_state(n, tau, cfg["lag2"]) if "lag2" in cfg else np.zeros(n)
        c0 = cfg.get("intercept", 0.0)
        eps = rng.normal(0.0, cfg["sigma"], n)
        y = np.empty(n)
        y[0] = rng.normal(0.0, 1.0)
        for t in range(1, n):
            y2 = y[t - 2] if t >= 2 else 0.0
            y[t] = c0 + phi1[t] * y[t - 1] + phi2[t] * y2 + eps[t]
        return TimeSeries.from_values(y), truth

    # LINREG: fixed number of replicate observations per state
    reps = cfg["replicates"]
    theta = np.repeat(_per_state(n, tau, values), reps)
    states = np.repeat(np.arange(1, n + 1), reps)
    x = rng.uniform(*cfg["x_range"], n * reps)
    y = cfg["intercept"] + theta * x + rng.normal(0.0, cfg["sigma"], n * reps)
    return TimeSeries.from_pairs(states, y, x), truth
