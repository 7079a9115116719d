"""The MMSE functional ``mmse(X, snr)`` and the identities it satisfies."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import Posterior
from .distributions import InputDistribution, mix
from .errors import DistributionError, VerificationError
from .quadrature import integrate

# Output components are integrated over +-TAIL_SIGMAS of their own spread;
# the neglected Gaussian tail is below 1e-22.
TAIL_SIGMAS = 10.0
ABSTOL = 1e-15
RELTOL = 1e-12


def y_breakpoints(dist: InputDistribution, snr: float) -> np.ndarray:
    """Initial panels for integrating over the channel output."""
    a = math.sqrt(snr)
    mu, v, _ = dist.arrays
    centers = a * mu
    spread = np.sqrt(1.0 + snr * v)
    lo = float(np.min(centers - TAIL_SIGMAS * spread))
    hi = float(np.max(centers + TAIL_SIGMAS * spread))
    if centers.size <= 64:
        offsets = np.arange(-TAIL_SIGMAS, TAIL_SIGMAS + 1, 2.0)
        pts = (centers[:, None] + spread[:, None] * offsets[None, :]).ravel()
        order = np.sort(centers)
        pts = np.concatenate([pts, 0.5 * (order[1:] + order[:-1])])
    else:
        pts = np.linspace(lo, hi, int(min(4000, math.ceil(hi - lo) + 2)))
    pts = pts[(pts >= lo) & (pts <= hi)]
    return np.unique(np.concatenate([[lo, hi], pts]))


def expect_over_y(dist: InputDistribution, snr: float, g, abstol=ABSTOL, reltol=RELTOL):
    """``E[g(Y)] = int h_0(y) g(posterior at y) dy`` for ``Y = sqrt(snr) X + N``.

    ``g`` receives a :class:`Posterior` and returns one array (or a stacked
    array of several integrands) over its observations.
    """
    a = math.sqrt(snr)

    def integrand(y):
        post = Posterior(dist, y, a)
        return post.density * np.asarray(g(post))

    return integrate(integrand, y_breakpoints(dist, snr), abstol=abstol, reltol=reltol)


@dataclass(frozen=True)
class MmseCurve:
    """Sampled MMSE curve: rows of ``(snr, value, quad_err)``."""

    dist: InputDistribution
    grid: tuple

    def __post_init__(self):
        snrs = [g[0] for g in self.grid]
        if any(b <= a for a, b in zip(snrs, snrs[1:])):
            raise DistributionError("curve SNR grid must be strictly increasing")

    @property
    def snr(self):
        return np.array([g[0] for g in self.grid])

    @property
    def values(self):
        return np.array([g[1] for g in self.grid])

    def check_invariants(self, tol=1e-10):
        var = self.dist.variance
        for s, val, _ in self.grid:
            if val < -tol or val > mmse_bounds(var, s) + tol:
                raise VerificationError(f"mmse {val!r} at snr {s} outside [0, min(var, 1/snr)]")
        if np.any(np.diff(self.values) > tol):
            raise VerificationError("mmse curve is not non-increasing")


def mmse_at(dist: InputDistribution, snr: float, abstol=ABSTOL, reltol=RELTOL):
    """``mmse(X, snr)`` and a quadrature error estimate.

    Computed as the average posterior variance ``E[Var(X | Y)]``; each
    posterior variance is exact, so only the outer integral over ``y`` is
    numerical. At ``snr = 0`` the input variance is returned exactly.
    """
    if snr < 0 or not math.isfinite(snr):
        raise DistributionError("snr must be finite and non-negative")
    if snr == 0:
        return dist.variance, 0.0
    if dist.kind == "discrete" and len(dist.atoms) == 1:
        return 0.0, 0.0
    value, err = expect_over_y(dist, snr, lambda p: p.central_moments(2)[0],
                               abstol=abstol, reltol=reltol)
    return max(float(value), 0.0), float(err)


def mmse(dist: InputDistribution, snr: float, **tol) -> float:
    return mmse_at(dist, snr, **tol)[0]


def mmse_via_kernels(dist: InputDistribution, snr: float, abstol=ABSTOL, reltol=RELTOL):
    """``E[X^2] - int h_1^2 / h_0 dy``: the textbook route, kept for cross-checks."""
    from .distributions import moment

    val, err = expect_over_y(dist, snr, lambda p: p.mean ** 2, abstol=abstol, reltol=reltol)
    return moment(dist, 2) - float(val), float(err)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("MMSE_LAB_THREADS", "1")))
    except ValueError:
        return 1


def grid_map(fn, items):
    """Map ``fn`` over ``items``, in parallel when ``MMSE_LAB_THREADS`` > 1."""
    items = list(items)
    n = _workers()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def mmse_curve(dist: InputDistribution, snrs, **tol) -> MmseCurve:
    snrs = sorted(float(s) for s in snrs)
    rows = grid_map(lambda s: (s, *mmse_at(dist, s, **tol)), snrs)
    return MmseCurve(dist, tuple(rows))


def mmse_bounds(variance, snr: float) -> float:
    """``min(Var X, 1/snr)``; pass ``variance=None`` when it is unknown."""
    inv = math.inf if snr == 0 else 1.0 / snr
    if variance is None:
        return inv
    if isinstance(variance, InputDistribution):
        variance = variance.variance
    return min(float(variance), inv)


@dataclass(frozen=True)
class ShiftScaleReport:
    passed: bool
    shift_residual: float
    scale_residual: float


def mmse_shift_scale_check(dist, a, b, snr, tol=1e-9) -> ShiftScaleReport:
    """Compare ``mmse(aX + b, snr)`` with ``a^2 mmse(X, a^2 snr)``."""
    from .distributions import affine

    lhs = mmse(affine(dist, a, b), snr)
    rhs = a * a * mmse(dist, a * a * snr) if a != 0 else 0.0
    shift = abs(mmse(affine(dist, 1.0, b), snr) - mmse(dist, snr))
    scale = abs(lhs - rhs)
    return ShiftScaleReport(scale <= tol and shift <= tol, shift, scale)


def incremental_mmse(dist: InputDistribution, snr: float, gamma: float,
                     abstol=1e-13, reltol=1e-10) -> float:
    """``mmse(X, gamma | sqrt(snr) X + N)`` as an average of per-slice MMSEs.

    For each observation ``y`` of the first channel the posterior law is a
    new input whose MMSE at ``gamma`` is computed from scratch; the results
    are averaged against the output density at ``snr``.
    """
    if snr < 0 or gamma < 0:
        raise DistributionError("snr and gamma must be non-negative")
    if snr == 0:
        return mmse(dist, gamma)

    def slice_mmse(post):
        return np.array([mmse(post.distribution(i), gamma, abstol=abstol * 1e-2,
                              reltol=reltol * 1e-2) for i in range(post.resp.shape[0])])

    val, _ = expect_over_y(dist, snr, slice_mmse, abstol=abstol, reltol=reltol)
    return float(val)


def conditional_mmse(family, snr: float, **tol) -> float:
    """``mmse(X, snr | U) = sum_u P(u) mmse(X_u, snr)`` for finite ``U``."""
    family = list(family)
    weights = [float(w) for _, w in family]
    if abs(math.fsum(weights) - 1.0) > 1e-9 or min(weights) < 0:
        raise DistributionError("family weights must be a probability vector")
    return math.fsum(w * mmse(d, snr, **tol) for d, w in family)


def family_mixture(family) -> InputDistribution:
    return mix(list(family))
