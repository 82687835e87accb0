"""Shared oracles for the test suite: independent implementations used to
cross-check the library, kept deliberately naive."""

import numpy as np


def naive_step_sum(baseline, atoms, t):
    """Loop-based step evaluation: baseline plus heights of atoms at or left of t."""
    total = baseline
    for xi, h in atoms:
        if xi <= t:
            total += h
    return total


def brute_kde_mode(samples, grid_points=4096):
    """Dense-grid Gaussian KDE argmax with the same bandwidth rule."""
    samples = np.asarray(samples, dtype=float)
    sd = samples.std()
    q75, q25 = np.percentile(samples, [75, 25])
    a = min(sd, (q75 - q25) / 1.34) or sd
    bw = 0.9 * a * samples.size ** (-0.2)
    lo, hi = samples.min() - 3 * bw, samples.max() + 3 * bw
    grid = np.linspace(lo, hi, grid_points)
    dens = np.exp(-0.5 * ((grid[:, None] - samples[None, :]) / bw) ** 2).sum(axis=1)
    return float(grid[np.argmax(dens)])


def anderson_darling(samples, cdf):
    """A-squared statistic against a fully specified continuous distribution."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    f = np.clip(cdf(x), 1e-12, 1 - 1e-12)
    i = np.arange(1, n + 1)
    return float(-n - np.mean((2 * i - 1) * (np.log(f) + np.log(1 - f[::-1]))))


# 1% upper-tail critical value for a fully specified null (case 0)
AD_CRIT_1PCT = 3.857


def batch_means_se(x, n_batches=100):
    """Autocorrelation-robust standard error of the mean via batch means."""
    x = np.asarray(x, dtype=float)
    m = x.size // n_batches
    bm = x[: n_batches * m].reshape(n_batches, m).mean(axis=1)
    return float(np.std(bm, ddof=1) / np.sqrt(n_batches))


def quad_moments(log_density, lo, hi, n=200_001):
    """Mean and SD of an unnormalised 1-d density by trapezoid quadrature."""
    grid = np.linspace(lo, hi, n)
    logf = np.array([log_density(g) for g in grid])
    logf -= logf.max()
    f = np.exp(logf)
    z = np.trapezoid(f, grid)
    mean = np.trapezoid(grid * f, grid) / z
    var = np.trapezoid((grid - mean) ** 2 * f, grid) / z
    return float(mean), float(np.sqrt(var))


def ks_distance(samples, cdf_grid, cdf_values):
    """Kolmogorov distance between an empirical sample and a reference CDF
    given on a dense grid."""
    x = np.sort(np.asarray(samples, dtype=float))
    ref = np.interp(x, cdf_grid, cdf_values)
    n = x.size
    emp_hi = np.arange(1, n + 1) / n
    emp_lo = np.arange(0, n) / n
    return float(max(np.max(np.abs(emp_hi - ref)), np.max(np.abs(emp_lo - ref))))
