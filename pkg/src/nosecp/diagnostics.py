"""MCMC convergence diagnostics."""

from __future__ import annotations

import numpy as np

__all__ = ["gelman_rubin", "split_rhat"]


def gelman_rubin(chains: np.ndarray) -> float:
    """Potential scale reduction factor for one scalar quantity.

    ``chains`` has shape (n_chains, n_draws).  Values near 1 indicate the
    chains agree; above roughly 1.1 they have not mixed.
    """
    chains = np.asarray(chains, dtype=np.float64)
    m, n = chains.shape
    if m < 2 or n < 2:
        return float("nan")
    means = chains.mean(axis=1)
    w = float(np.mean(chains.var(axis=1, ddof=1)))
    b = n * float(np.var(means, ddof=1))
    if w == 0.0:
        return 1.0 if b == 0.0 else float("inf")
    v = (n - 1.0) / n * w + b / n
    return float(np.sqrt(v / w))


def split_rhat(chains: np.ndarray) -> float:
    """Gelman-Rubin factor with each chain split in half.

    Splitting detects within-chain drift that plain R-hat misses.  Odd
    trailing draws are dropped.
    """
    chains = np.asarray(chains, dtype=np.float64)
    m, n = chains.shape
    half = n // 2
    if half < 2:
        return float("nan")
    halves = np.concatenate([chains[:, :half], chains[:, half:2 * half]], axis=0)
    return gelman_rubin(halves)
