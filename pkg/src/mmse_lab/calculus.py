"""Derivatives of the MMSE in SNR, zero-SNR Taylor coefficients, Hermite polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import InputDistribution, moment
from .errors import DistributionError, VerificationError
from .mmse import conditional_mmse, expect_over_y, mmse

MAX_HERMITE = 32
REL_FLOOR = 1e-12


def hermite(n: int, x):
    """Probabilists' Hermite polynomial ``He_n(x)`` by three-term recurrence.

    ``He_n = (-1)^n phi^{(n)} / phi``, so ``He_2(x) = x^2 - 1``.
    """
    if n < 0 or n > MAX_HERMITE or int(n) != n:
        raise DistributionError(f"Hermite order must be an integer in [0, {MAX_HERMITE}]")
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), x.copy()
    if n == 0:
        return prev if prev.ndim else float(prev)
    for k in range(1, n):
        prev, cur = cur, x * cur - k * prev
    return cur if cur.ndim else float(cur)


def _derivative_poly(order, M2, M3, M4):
    if order == 1:
        return -M2 ** 2
    if order == 2:
        return 2 * M2 ** 3 - M3 ** 2
    return 6 * M4 * M2 ** 2 - M4 ** 2 + 12 * M3 ** 2 * M2 - 15 * M2 ** 4


def _zero_snr_derivative(dist, order):
    m2, m3, m4 = (moment(dist, k, central=True) for k in (2, 3, 4))
    return float(_derivative_poly(order, m2, m3, m4))


def mmse_derivative(dist: InputDistribution, snr: float, order: int,
                    abstol=1e-15, reltol=1e-12) -> float:
    """``d^order/dsnr^order mmse(X, snr)`` for ``order`` in 1..3.

    Evaluated as the average over ``Y`` of a polynomial in the posterior
    central moments; at ``snr = 0`` the prior central moments are plugged
    in directly.
    """
    if order not in (1, 2, 3):
        raise DistributionError("derivative order must be 1, 2 or 3")
    if snr < 0:
        raise DistributionError("snr must be non-negative")
    if snr == 0:
        return _zero_snr_derivative(dist, order)

    def poly(post):
        M2, M3, M4 = post.central_moments(4)
        return _derivative_poly(order, M2, M3, M4)

    val, _ = expect_over_y(dist, snr, poly, abstol=abstol, reltol=reltol)
    return float(val)


def taylor_zero(dist: InputDistribution, max_order: int = 3):
    """Coefficients of ``snr^0 .. snr^max_order`` in the expansion at ``0+``."""
    if max_order < 0 or max_order > 3:
        raise DistributionError("taylor_zero supports max_order <= 3")
    m2 = moment(dist, 2, central=True)
    coeffs = [m2]
    for k in range(1, max_order + 1):
        coeffs.append(_zero_snr_derivative(dist, k) / math.factorial(k))
    return coeffs


def taylor_eval(coeffs, snr):
    return sum(c * snr ** k for k, c in enumerate(coeffs))


def conditional_mmse_derivative(family, snr: float, **tol) -> float:
    """``d/dsnr mmse(X, snr | U) = -sum_u P(u) E[M_2(u)^2]``."""
    if snr <= 0:
        raise DistributionError("conditional derivative needs snr > 0")
    return math.fsum(w * mmse_derivative(d, snr, 1, **tol) for d, w in family)


def richardson_fd(f, x: float, order: int, steps=None):
    """Central finite differences of ``f`` at ``x`` with Richardson extrapolation.

    Every stencil has an even ``h^2`` error expansion, so successive
    halvings are combined with factors 4, 16, ...
    """
    if steps is None:
        base = 1e-2 * max(x, 1.0)
        steps = (base, base / 2, base / 4)
    reach = 2 if order == 3 else 1
    if x - reach * steps[0] <= 0:
        raise DistributionError("finite-difference stencil crosses snr = 0")
    f0 = f(x) if order == 2 else None
    estimates = []
    for h in steps:
        if order == 1:
            d = (f(x + h) - f(x - h)) / (2 * h)
        elif order == 2:
            d = (f(x + h) - 2 * f0 + f(x - h)) / h ** 2
        elif order == 3:
            d = (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h ** 3)
        else:
            raise DistributionError("finite differences support orders 1..3")
        estimates.append(d)
    table = [estimates]
    for level in range(1, len(steps)):
        ratio = steps[level - 1] / steps[level]
        factor = ratio ** (2 * level)
        prev = table[-1]
        table.append([(factor * prev[i + 1] - prev[i]) / (factor - 1)
                      for i in range(len(prev) - 1)])
    return table[-1][0]


def finite_difference(dist: InputDistribution, snr: float, order: int, steps=None) -> float:
    return richardson_fd(lambda s: mmse(dist, s, abstol=1e-17, reltol=1e-14),
                         snr, order, steps)


@dataclass(frozen=True)
class DerivativeReport:
    snr: float
    order: int
    analytic: float
    finite_diff: float
    rel_gap: float


def rel_gap(analytic, fd, floor=REL_FLOOR):
    return abs(analytic - fd) / max(abs(analytic), floor)


def derivative_report(dist, snr, order, floor=REL_FLOOR, tol=None) -> DerivativeReport:
    analytic = mmse_derivative(dist, snr, order)
    fd = finite_difference(dist, snr, order)
    report = DerivativeReport(snr, order, analytic, fd, rel_gap(analytic, fd, floor))
    if tol is not None and report.rel_gap > tol:
        raise VerificationError(
            f"order-{order} derivative at snr={snr}: analytic {analytic!r} vs "
            f"finite difference {fd!r}")
    return report


def conditional_finite_difference(family, snr, order=1, steps=None):
    return richardson_fd(lambda s: conditional_mmse(family, s, abstol=1e-17, reltol=1e-14),
                         snr, order, steps)
