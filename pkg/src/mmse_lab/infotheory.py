"""Mutual information and entropies through integrals of the MMSE over SNR.

All values are in nats.
"""

from __future__ import annotations

import math

import numpy as np

from .calculus import mmse_derivative
from .distributions import InputDistribution
from .errors import DistributionError, QuadratureError
from .mmse import expect_over_y, mmse
from .quadrature import integrate

HALF_LOG_2PIE = 0.5 * math.log(2 * math.pi * math.e)
INNER = {"abstol": 1e-16, "reltol": 1e-13}
GAMMA_CAP = 2.0 ** 20


def _mmse_vec(dist, gammas):
    return np.array([mmse(dist, g, **INNER) for g in np.ravel(gammas)])


def integrate_mmse(dist: InputDistribution, lo: float, hi: float, abstol=1e-12, reltol=1e-10):
    """``int_lo^hi mmse(X, g) dg`` using the substitution ``g = e^u - 1``."""
    if hi < lo:
        raise DistributionError("integration limits out of order")
    if hi == lo:
        return 0.0, 0.0
    u_lo, u_hi = math.log1p(lo), math.log1p(hi)

    def f(u):
        g = np.expm1(u)
        return _mmse_vec(dist, g) * np.exp(u)

    edges = np.linspace(u_lo, u_hi, max(2, int(math.ceil((u_hi - u_lo) / 0.5)) + 1))
    return integrate(f, edges, abstol=abstol, reltol=reltol)


def mutual_information(dist: InputDistribution, snr: float, **tol) -> float:
    """``I(X; sqrt(snr) X + N) = 1/2 int_0^snr mmse(X, g) dg``."""
    if snr < 0:
        raise DistributionError("snr must be non-negative")
    val, _ = integrate_mmse(dist, 0.0, snr, **tol)
    return 0.5 * float(val)


def mutual_information_direct(dist: InputDistribution, snr: float) -> float:
    """``I = -int h_0 log h_0 dy - log(2 pi e) / 2``: the output-entropy route."""
    if snr == 0:
        return 0.0
    val, _ = expect_over_y(dist, snr, lambda p: -p.log_density, abstol=1e-14, reltol=1e-12)
    return float(val) - HALF_LOG_2PIE


def discrete_entropy(dist: InputDistribution, tail_tol=1e-12) -> float:
    """``H(X) = 1/2 int_0^inf mmse(X, g) dg`` for a discrete input.

    The upper limit doubles until the MMSE falls below ``tail_tol``; the
    remaining tail is closed with the local exponential decay rate
    ``-mmse' / mmse``.
    """
    if dist.kind != "discrete":
        raise DistributionError("discrete_entropy needs a discrete input")
    if len(dist.atoms) == 1:
        return 0.0
    g_max = 8.0
    while mmse(dist, g_max, **INNER) > tail_tol:
        g_max *= 2
        if g_max > GAMMA_CAP:
            raise QuadratureError("MMSE tail does not decay; repeated-atom pathology?")
    body, _ = integrate_mmse(dist, 0.0, g_max)
    m = mmse(dist, g_max, **INNER)
    slope = -mmse_derivative(dist, g_max, 1)
    tail = m * m / slope if m > 0 and slope > 0 else 0.0
    return 0.5 * (float(body) + tail)


def differential_entropy(dist: InputDistribution, g_max: float = 1e6,
                         tail_budget: float = 1e-4) -> float:
    """``h(X) = log(2 pi e)/2 - 1/2 int_0^inf [1/(1+g) - mmse(X, g)] dg``.

    Beyond ``g_max`` the integrand behaves as ``c / g^2``; ``c`` is fitted
    on the last decade and the tail integrated in closed form.
    """
    if not dist.is_continuous:
        raise DistributionError("differential_entropy needs a purely continuous input")
    u_hi = math.log1p(g_max)

    def f(u):
        g = np.expm1(u)
        return (1.0 / (1.0 + g) - _mmse_vec(dist, g)) * np.exp(u)

    edges = np.linspace(0.0, u_hi, int(math.ceil(u_hi / 0.5)) + 1)
    body, _ = integrate(f, edges, abstol=1e-11, reltol=1e-9)
    fit_g = np.geomspace(g_max / 10, g_max, 8)
    fit_y = 1.0 / (1.0 + fit_g) - _mmse_vec(dist, fit_g)
    basis = fit_g ** -2.0
    c = float(basis @ fit_y / (basis @ basis))
    resid = np.max(np.abs(fit_y - c * basis)) * g_max
    tail = c / g_max
    if resid > tail_budget:
        raise QuadratureError(f"differential-entropy tail fit residual {resid:.2e} over budget")
    return HALF_LOG_2PIE - 0.5 * (float(body) + tail)


def _mi_poly(order, M2, M3, M4):
    if order == 1:
        return 0.5 * M2
    if order == 2:
        return -0.5 * M2 ** 2
    if order == 3:
        return M2 ** 3 - 0.5 * M3 ** 2
    # Half the third MMSE derivative; see the note in the README.
    return 0.5 * (-M4 ** 2 + 6 * M4 * M2 ** 2 + 12 * M3 ** 2 * M2 - 15 * M2 ** 4)


def mi_derivative(dist: InputDistribution, snr: float, order: int) -> float:
    """``d^order/dsnr^order I(X; sqrt(snr) X + N)`` for ``order`` in 1..4."""
    if order not in (1, 2, 3, 4):
        raise DistributionError("mutual-information derivative order must be 1..4")
    if snr <= 0:
        raise DistributionError("mi_derivative needs snr > 0")

    def poly(post):
        M2, M3, M4 = post.central_moments(4)
        return _mi_poly(order, M2, M3, M4)

    val, _ = expect_over_y(dist, snr, poly, abstol=1e-15, reltol=1e-12)
    return float(val)


def to_bits(nats: float) -> float:
    return nats / math.log(2)
