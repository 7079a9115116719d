"""Posterior quantities of the scalar Gaussian channel ``Y = a X + N``.

For a prior that is a mixture of point masses and Gaussians, the posterior
given ``Y = y`` is again such a mixture: each prior component ``(mu, v, w)``
becomes ``N(mu + a v (y - a mu) / tau2, v / tau2)`` with ``tau2 = 1 + a^2 v``
and responsibility proportional to ``w N(y; a mu, tau2)``. Every kernel,
moment and density below is read off that closed form in the log domain,
so nothing underflows for large ``|y|`` or high SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, logsumexp, ndtr

from .distributions import InputDistribution, gaussian_moment
from .errors import DistributionError

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
MAX_KERNEL_ORDER = 16
MAX_POSTERIOR_ORDER = 8
# Caps the size of the (y, component) work array.
_CHUNK = 2_000_000


@dataclass(frozen=True)
class ChannelPoint:
    snr: float
    a: float
    y: float

    def __post_init__(self):
        if self.snr < 0:
            raise DistributionError("snr must be non-negative")
        if abs(self.a * self.a - self.snr) > 1e-14 * max(1.0, self.snr):
            raise DistributionError("a must equal sqrt(snr)")

    @classmethod
    def at(cls, y, snr):
        return cls(float(snr), math.sqrt(snr), float(y))


@dataclass(frozen=True)
class PosteriorSummary:
    """Posterior mean, central moments ``M_2..M_k`` and output density at one ``y``."""

    point: ChannelPoint
    mean: float
    central: tuple  # central[i - 2] is M_i
    density: float

    def M(self, i: int) -> float:
        if i == 1:
            return 0.0
        return self.central[i - 2]


class Posterior:
    """Vectorized posterior mixture for an array of observations."""

    def __init__(self, dist: InputDistribution, y, a: float):
        mu, v, w = dist.arrays
        y = np.asarray(y, dtype=float)
        if not np.all(np.isfinite(y)):
            raise DistributionError("observation must be finite")
        self.shape = y.shape
        y = y.reshape(-1, 1)
        tau2 = 1.0 + a * a * v
        resid = y - a * mu
        with np.errstate(divide="ignore"):
            logw = np.log(w)
        logk = logw - LOG_SQRT_2PI - 0.5 * np.log(tau2) - 0.5 * resid ** 2 / tau2
        self.log_density = logsumexp(logk, axis=1)
        self.resp = np.exp(logk - self.log_density[:, None])
        self.comp_mean = mu + (a * v / tau2) * resid
        self.comp_var = v / tau2

    @property
    def density(self):
        return np.exp(self.log_density).reshape(self.shape)

    @property
    def mean(self):
        return (self.resp * self.comp_mean).sum(axis=1).reshape(self.shape)

    def central_moments(self, kmax: int, center=None):
        """``E[(X - c)^i | y]`` for ``i = 2..kmax``, default ``c`` the posterior mean.

        Each component contributes ``E[(d + s Z)^i]`` with ``d`` its offset
        from the centre, expanded over the even Gaussian moments, so no
        raw-moment cancellation occurs.
        """
        c = (self.resp * self.comp_mean).sum(axis=1) if center is None else center
        d = self.comp_mean - np.reshape(c, (-1, 1))
        s2 = self.comp_var
        out = []
        for i in range(2, kmax + 1):
            term = np.zeros_like(d)
            for j in range(0, i + 1, 2):
                term = term + math.comb(i, j) * gaussian_moment(j) * s2 ** (j // 2) * d ** (i - j)
            out.append((self.resp * term).sum(axis=1).reshape(self.shape))
        return out

    def raw_moment(self, i: int):
        return self.central_moments(max(i, 2), center=0.0)[i - 2] if i >= 2 else (
            self.mean if i == 1 else np.ones(self.shape))

    def abs_moment(self, n: int, center=None):
        """``E[|X - c|^n | y]`` using truncated-normal moment recursions."""
        c = (self.resp * self.comp_mean).sum(axis=1) if center is None else center
        d = self.comp_mean - np.reshape(c, (-1, 1))
        s = np.sqrt(self.comp_var) * np.ones_like(d)
        total = np.abs(d) ** n
        gauss = s > 0
        if np.any(gauss):
            dg, sg = d[gauss], s[gauss]
            total[gauss] = (_positive_part_moment(dg, sg, n)
                            + _positive_part_moment(-dg, sg, n))
        return (self.resp * total).sum(axis=1).reshape(self.shape)

    def tail_probability(self, x: float):
        """``P(|X| >= x | y)``."""
        d = self.comp_mean
        s = np.sqrt(self.comp_var) * np.ones_like(d)
        atom = s == 0
        tail = np.where(atom, (np.abs(d) >= x).astype(float), 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            upper = ndtr((d - x) / np.where(atom, 1.0, s))
            lower = ndtr((-x - d) / np.where(atom, 1.0, s))
        tail = np.where(atom, tail, upper + lower)
        return (self.resp * tail).sum(axis=1).reshape(self.shape)

    def distribution(self, index: int = 0) -> InputDistribution:
        """The posterior law at one observation as an ``InputDistribution``."""
        from .distributions import _canonical

        r = self.resp[index]
        m = self.comp_mean[index]
        atoms = [(x, p) for x, p, v in zip(m, r, self.comp_var) if v == 0]
        comps = [(x, v, p) for x, p, v in zip(m, r, self.comp_var) if v > 0]
        return _canonical(atoms, comps)


def _positive_part_moment(mu, s, n):
    """``E[W^n 1{W > 0}]`` for ``W ~ N(mu, s^2)`` elementwise."""
    z = mu / s
    t_prev = np.exp(log_ndtr(z))
    if n == 0:
        return t_prev
    t = mu * t_prev + s * np.exp(-0.5 * z * z - LOG_SQRT_2PI)
    for k in range(2, n + 1):
        t_prev, t = t, mu * t + (k - 1) * s * s * t_prev
    return np.maximum(t, 0.0)


def _chunks(dist, y):
    y = np.atleast_1d(np.asarray(y, dtype=float))
    step = max(1, _CHUNK // max(1, dist.arrays[0].size))
    for start in range(0, y.size, step):
        yield y[start:start + step]


def posterior(dist: InputDistribution, y, snr: float) -> Posterior:
    return Posterior(dist, y, math.sqrt(snr))


def kernel_h(dist: InputDistribution, y, a: float, i: int):
    """``h_i(y; a) = E[X^i phi(y - a X)]`` evaluated exactly.

    Equal to the output density times the ``i``-th raw posterior moment.
    """
    if i < 0 or i > MAX_KERNEL_ORDER:
        raise DistributionError(f"kernel order must be in [0, {MAX_KERNEL_ORDER}]")
    scalar = np.ndim(y) == 0
    parts = []
    for chunk in _chunks(dist, y):
        post = Posterior(dist, chunk, a)
        parts.append(post.density * post.raw_moment(i))
    out = np.concatenate(parts)
    return float(out[0]) if scalar else out


def output_density(dist: InputDistribution, y, snr: float):
    scalar = np.ndim(y) == 0
    out = np.concatenate([posterior(dist, c, snr).density for c in _chunks(dist, y)])
    return float(out[0]) if scalar else out


def posterior_mean(dist: InputDistribution, y, snr: float):
    """Conditional mean estimate ``E[X | Y = y]`` (the prior mean at ``snr = 0``)."""
    scalar = np.ndim(y) == 0
    if snr == 0:
        out = np.full(np.shape(np.atleast_1d(y)), dist.mean)
    else:
        out = np.concatenate([posterior(dist, c, snr).mean for c in _chunks(dist, y)])
    return float(out[0]) if scalar else out


def posterior_summary(dist: InputDistribution, y: float, snr: float,
                      k_max: int = 4) -> PosteriorSummary:
    if k_max < 2 or k_max > MAX_POSTERIOR_ORDER:
        raise DistributionError(f"k_max must be in [2, {MAX_POSTERIOR_ORDER}]")
    point = ChannelPoint.at(y, snr)
    post = Posterior(dist, [y], point.a)
    if snr == 0:
        from .distributions import moment

        central = tuple(moment(dist, i, central=True) for i in range(2, k_max + 1))
        mean = dist.mean
    else:
        central = tuple(float(m[0]) for m in post.central_moments(k_max))
        mean = float(post.mean[0])
    return PosteriorSummary(point, mean, central, float(post.density[0]))


def posterior_tail_bound(dist: InputDistribution, y, a: float, x: float):
    """Sub-Gaussian bound on ``P(|X_y| >= x)``.

    Returns ``sqrt(2/pi) exp(y^2/2) / h_0(y; a) * exp(-a^2 x^2 / 4)``,
    uncapped: the value may exceed one and callers may clip it.
    """
    if a == 0:
        raise DistributionError("the tail bound requires a != 0")
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    log_h0 = Posterior(dist, y, a).log_density
    log_b = 0.5 * math.log(2 / math.pi) + 0.5 * y * y - log_h0 - 0.25 * a * a * x * x
    out = np.exp(log_b)
    return float(out[0]) if scalar else out


def posterior_moment_bound(y, a: float, log_h0, n: int):
    """Bound on ``E|X_y|^n``: ``n e^{y^2/2} / h_0 * (sqrt(2)/|a|)^n sqrt((n-1)!)``."""
    log_b = (math.log(n) + 0.5 * np.asarray(y) ** 2 - log_h0
             + n * (0.5 * math.log(2) - math.log(abs(a))) + 0.5 * math.lgamma(n))
    return np.exp(log_b)
