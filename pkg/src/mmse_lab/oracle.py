"""Seeded Monte Carlo estimators: the independent check on every quadrature result.

Random numbers come from the counter-based Philox generator. Each batch
gets its own key derived from ``(seed, batch index)``, and normal variates
are produced by the inverse CDF, so a given ``(seed, n)`` reproduces
bit-for-bit regardless of how batches are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.special import ndtri

from .channel import LOG_SQRT_2PI, Posterior
from .distributions import InputDistribution
from .errors import DistributionError

BATCH = 1 << 18
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float
    n_samples: int
    seed: int

    def z_score(self, reference: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.value == reference else math.inf
        return (self.value - reference) / self.stderr

    def covers(self, reference: float, k: float = 4.0, floor: float = 0.0) -> bool:
        """``|value - reference| <= k stderr``, plus a few ulps of rounding slack.

        The slack matters only when the statistic is constant (zero stderr),
        as for posterior variances of a Gaussian input.
        """
        ulps = 64 * np.finfo(float).eps * max(abs(self.value), abs(reference))
        return abs(self.value - reference) <= k * self.stderr + floor + ulps


def _rng(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), batch]))


def _uniform(rng, size):
    # Open interval (0, 1) so the inverse CDF stays finite.
    return (rng.integers(0, 2**53, size=size, dtype=np.int64) + 0.5) / 2.0**53


def sample_input(dist: InputDistribution, rng, size):
    mu, v, w = dist.arrays
    cdf = np.cumsum(w)
    cdf[-1] = 1.0
    k = np.searchsorted(cdf, _uniform(rng, size), side="right")
    k = np.minimum(k, mu.size - 1)
    return mu[k] + np.sqrt(v[k]) * ndtri(_uniform(rng, size))


def _batches(n):
    start = 0
    index = 0
    while start < n:
        size = min(BATCH, n - start)
        yield index, size
        start += size
        index += 1


def _accumulate(dist, n, seed, statistic):
    if n < MIN_SAMPLES:
        raise DistributionError(f"need at least {MIN_SAMPLES} samples")
    total = total_sq = 0.0
    for index, size in _batches(n):
        rng = _rng(seed, index)
        x = sample_input(dist, rng, size)
        noise = ndtri(_uniform(rng, size))
        vals = statistic(x, noise)
        total += math.fsum(vals)
        total_sq += math.fsum(vals * vals)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return McEstimate(mean, math.sqrt(var / n), n, seed)


def mc_moment(dist: InputDistribution, k: int, n_samples: int = 10**6,
              seed: int = 0) -> McEstimate:
    """Sample average of ``X^k``."""
    return _accumulate(dist, n_samples, seed, lambda x, noise: x ** k)


def mc_mmse(dist: InputDistribution, snr: float, n_samples: int = 10**6,
            seed: int = 0) -> McEstimate:
    """Average of ``(X - E[X|Y])^2`` over simulated ``(X, N)`` pairs."""
    a = math.sqrt(snr)

    def stat(x, noise):
        if snr == 0:
            return (x - dist.mean) ** 2
        return (x - Posterior(dist, a * x + noise, a).mean) ** 2

    return _accumulate(dist, n_samples, seed, stat)


def mc_mutual_information(dist: InputDistribution, snr: float, n_samples: int = 10**6,
                          seed: int = 0) -> McEstimate:
    """Average of ``log phi(Y - aX) - log h_0(Y)``."""
    a = math.sqrt(snr)

    def stat(x, noise):
        if snr == 0:
            return np.zeros_like(x)
        y = a * x + noise
        return -0.5 * noise ** 2 - LOG_SQRT_2PI - Posterior(dist, y, a).log_density

    return _accumulate(dist, n_samples, seed, stat)


def mc_statistic(dist: InputDistribution, snr: float, statistic, n_samples: int = 10**6,
                 seed: int = 0) -> McEstimate:
    """Generic ``E[statistic(X, Y, posterior)]`` over the channel."""
    a = math.sqrt(snr)

    def stat(x, noise):
        y = a * x + noise
        return statistic(x, y, Posterior(dist, y, a))

    return _accumulate(dist, n_samples, seed, stat)


@dataclass(frozen=True)
class SliceEstimate:
    """Self-normalized importance-sampling estimates at one observation."""

    mean: McEstimate
    central: dict  # order -> McEstimate
    ess: float


def mc_posterior_slice(dist: InputDistribution, y: float, snr: float,
                       n_samples: int = 10**6, seed: int = 0, k_max: int = 4) -> SliceEstimate:
    """Posterior mean and central moments at ``Y = y`` from prior draws.

    Draws ``x`` from the prior and weights them by ``phi(y - sqrt(snr) x)``.
    Standard errors use the delta-method variance of a ratio estimator.
    """
    if n_samples < MIN_SAMPLES:
        raise DistributionError(f"need at least {MIN_SAMPLES} samples")
    a = math.sqrt(snr)
    xs, ws = [], []
    for index, size in _batches(n_samples):
        rng = _rng(seed, index)
        x = sample_input(dist, rng, size)
        xs.append(x)
        ws.append(-0.5 * (y - a * x) ** 2)
    x = np.concatenate(xs)
    logw = np.concatenate(ws)
    w = np.exp(logw - logw.max())
    w /= w.sum()
    ess = 1.0 / float(np.sum(w * w))

    def ratio(g):
        est = float(np.sum(w * g))
        se = math.sqrt(float(np.sum(w * w * (g - est) ** 2)))
        return est, se

    m, m_se = ratio(x)
    central = {}
    for k in range(2, k_max + 1):
        est, se = ratio((x - m) ** k)
        central[k] = McEstimate(est, se, n_samples, seed)
    return SliceEstimate(McEstimate(m, m_se, n_samples, seed), central, ess)


def gh_kernel_h(dist: InputDistribution, y: float, a: float, i: int, rtol: float = 1e-10):
    """``h_i(y; a)`` by Gauss-Hermite quadrature over each Gaussian component.

    Node counts double 33 -> 65 -> 129 -> 257 until successive estimates
    agree to ``rtol``. Atoms are summed exactly. Independent of the
    conjugate-posterior formulas used by the library.
    """
    def phi(t):
        return np.exp(-0.5 * t * t - LOG_SQRT_2PI)

    total = math.fsum(p * x ** i * float(phi(y - a * x)) for x, p in dist.atoms)
    for m, v, p in dist.components:
        prev = None
        for n in (33, 65, 129, 257):
            nodes, weights = hermegauss(n)
            x = m + math.sqrt(v) * nodes
            est = float(np.sum(weights * x ** i * phi(y - a * x))) / math.sqrt(2 * math.pi)
            if prev is not None and abs(est - prev) <= rtol * max(abs(est), 1e-300):
                break
            prev = est
        total += p * est
    return total
