"""Capacity applications: Gaussian wiretap, degraded broadcast converse, EPI special case."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import InputDistribution, convolve, make_gaussian, mix, moment
from .errors import DistributionError, VerificationError
from .infotheory import differential_entropy, integrate_mmse, mutual_information
from .mmse import conditional_mmse

POWER_TOL = 1e-9


@dataclass(frozen=True)
class CapacityRegionSample:
    alpha: float
    r1: float
    r2: float


def secrecy_capacity(snr1: float, snr2: float) -> float:
    """``1/2 log((1 + snr1) / (1 + snr2))`` for the degraded Gaussian wiretap channel."""
    if snr2 < 0 or snr1 < snr2:
        raise DistributionError("need snr1 >= snr2 >= 0")
    return 0.5 * (math.log1p(snr1) - math.log1p(snr2))


def _power_check(dist):
    power = moment(dist, 2)
    if power > 1 + POWER_TOL:
        raise DistributionError(f"input power E[X^2] = {power!r} exceeds 1")
    return power


def secrecy_gap(dist: InputDistribution, snr1: float, snr2: float) -> float:
    """``I(X;Y) - I(X;Z) = 1/2 int_snr2^snr1 mmse(X, g) dg`` under unit power."""
    if snr2 < 0 or snr1 < snr2:
        raise DistributionError("need snr1 >= snr2 >= 0")
    _power_check(dist)
    val, _ = integrate_mmse(dist, snr2, snr1)
    return 0.5 * float(val)


def broadcast_region(snr1: float, snr2: float, alphas) -> list:
    if snr2 < 0 or snr1 < snr2:
        raise DistributionError("need snr1 >= snr2 >= 0")
    out = []
    for alpha in alphas:
        alpha = float(alpha)
        if not 0 <= alpha <= 1:
            raise DistributionError(f"alpha {alpha} outside [0, 1]")
        r1 = 0.5 * math.log1p(alpha * snr1)
        r2 = 0.5 * (math.log1p(snr2) - math.log1p(alpha * snr2))
        out.append(CapacityRegionSample(alpha, r1, r2))
    return out


@dataclass(frozen=True)
class ConverseReport:
    """Numerical walk through the broadcast converse for one ``P_{UX}``."""

    alpha: float
    snr0: float
    i_xz_given_u: float
    i_xy_given_u: float
    i_uz: float
    r1_bound: float
    r2_bound: float
    max_mmse_excess: float
    passed: bool
    slack: dict = field(default_factory=dict)


def _family_mi(family, snr):
    return math.fsum(w * mutual_information(d, snr) for d, w in family)


def broadcast_converse_check(family, snr1: float, snr2: float, tol: float = 1e-7,
                             n_grid: int = 16) -> ConverseReport:
    """Check that ``(I(X;Y|U), I(U;Z))`` lies inside the Gaussian region.

    ``family`` lists ``(X_u law, P(U=u))``. The steps follow the MMSE proof:
    solve for ``alpha`` from ``I(X;Z|U)``, locate the crossing ``snr0``,
    confirm the conditional MMSE stays under ``alpha/(alpha g + 1)`` on
    ``[snr2, snr1]`` and compare both rates with the region at ``alpha``.
    """
    family = [(d, float(w)) for d, w in family]
    if snr2 < 0 or snr1 < snr2:
        raise DistributionError("need snr1 >= snr2 >= 0")
    _power_check(mix(family))

    i_xz_u = _family_mi(family, snr2)
    if snr2 > 0:
        alpha = math.expm1(2 * i_xz_u) / snr2
    else:
        alpha = math.fsum(w * d.variance for d, w in family)
    if alpha > 1 + tol:
        raise VerificationError(f"alpha = {alpha!r} exceeds 1 under the power constraint")
    alpha = min(max(alpha, 0.0), 1.0)

    def g(gamma):
        return conditional_mmse(family, gamma) - alpha / (alpha * gamma + 1)

    snr0 = _locate_snr0(g, snr2, tol)
    gammas = np.linspace(snr2, snr1, n_grid)
    excess = max(g(x) for x in gammas)
    if excess > tol:
        raise VerificationError(
            f"conditional MMSE exceeds alpha/(alpha g + 1) by {excess:.3e} above snr2")

    i_xy_u = _family_mi(family, snr1)
    i_uz = mutual_information(mix(family), snr2) - i_xz_u
    region = broadcast_region(snr1, snr2, [alpha])[0]
    slack = {"r1": region.r1 - i_xy_u, "r2": region.r2 - i_uz}
    passed = slack["r1"] >= -tol and slack["r2"] >= -tol
    if not passed:
        raise VerificationError(f"rate pair outside the Gaussian region: {slack}")
    return ConverseReport(alpha, snr0, i_xz_u, i_xy_u, i_uz, region.r1, region.r2,
                          float(excess), passed, slack)


def _locate_snr0(g, snr2, tol):
    """Bisection for a zero of ``g`` on ``[0, snr2]``; returns 0 if ``g`` is flat."""
    if snr2 == 0:
        return 0.0
    g_lo, g_hi = g(0.0), g(snr2)
    if abs(g_lo) <= tol:
        return 0.0
    if abs(g_hi) <= tol:
        return snr2
    if (g_lo > 0) == (g_hi > 0):
        # The integral of g over [0, snr2] vanishes, so a sign change must exist;
        # scan for it before bisecting.
        xs = np.linspace(0.0, snr2, 33)
        vals = [g(x) for x in xs]
        idx = [k for k in range(32) if (vals[k] > 0) != (vals[k + 1] > 0)]
        if not idx:
            if max(abs(v) for v in vals) <= 10 * tol:
                return 0.0
            raise VerificationError("no crossing of the conditional MMSE below snr2")
        lo, hi, g_lo = xs[idx[0]], xs[idx[0] + 1], vals[idx[0]]
    else:
        lo, hi = 0.0, snr2
    while hi - lo > 1e-10 * (1 + hi):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if (gm > 0) == (g_lo > 0):
            lo, g_lo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class EpiReport:
    lhs: float
    rhs: float
    margin: float
    h_x: float
    h_sum: float
    min_integral: float


def epi_gaussian_check(dist: InputDistribution, var_z: float, snr_grid=None,
                       tol: float = 1e-6) -> EpiReport:
    """``e^{2h(X+Z)}`` versus ``e^{2h(X)} + 2 pi e var_z`` for Gaussian ``Z``.

    Both entropies come from the MMSE integral. The proof integral
    ``1/2 int_0^snr [mmse(X, g) - mmse(aW, g)] dg`` against the Gaussian of
    equal entropy is also evaluated along ``snr_grid`` and must stay
    non-negative.
    """
    if not dist.is_continuous:
        raise DistributionError("epi_gaussian_check needs a continuous input")
    if var_z <= 0:
        raise DistributionError("var_z must be positive")
    h_x = differential_entropy(dist)
    h_sum = differential_entropy(convolve(dist, make_gaussian(0.0, var_z)))
    two_pi_e = 2 * math.pi * math.e
    lhs = math.exp(2 * h_sum)
    rhs = math.exp(2 * h_x) + two_pi_e * var_z
    a2 = math.exp(2 * h_x) / two_pi_e

    if snr_grid is None:
        snr_grid = np.geomspace(1e-2, 1e3, 12)
    running, prev, lowest = 0.0, 0.0, math.inf
    for s in sorted(snr_grid):
        piece, _ = integrate_mmse(dist, prev, s)
        gauss = math.log1p(a2 * s) - math.log1p(a2 * prev)
        running += 0.5 * (float(piece) - gauss)
        lowest = min(lowest, running)
        prev = s
    if lowest < -tol:
        raise VerificationError(f"entropy-matched MMSE integral dips to {lowest:.3e}")
    return EpiReport(lhs, rhs, lhs - rhs, h_x, h_sum, lowest)
