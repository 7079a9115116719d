"""Structural checks on MMSE curves: single crossing, dominance, concavity, monotonicity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import mmse_derivative
from .distributions import InputDistribution, affine, convolve, mix, normalized_iid_sum
from .errors import DistributionError, VerificationError
from .mmse import conditional_mmse, grid_map, mmse

ZERO_BAND = 1e-9
CHECK_TOL = 1e-7

NO_CROSSING_NONNEG = "no_crossing_nonneg"
NO_CROSSING_NEGATIVE = "no_crossing_negative_tail_impossible"
SINGLE_CROSSING = "single_crossing"
IDENTICAL = "identical"


@dataclass(frozen=True)
class GridConfig:
    lo: float = 1e-4
    hi: float = 1e4
    n: int = 400
    band: float = ZERO_BAND

    def grid(self):
        return np.geomspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class CrossingReport:
    sigma2: float
    crossings: tuple
    classification: str
    gammas: tuple = field(repr=False)
    f_grid: tuple = field(repr=False)
    touches_origin: bool = False
    statements: dict = field(default_factory=dict)

    @property
    def crossing_point(self):
        if not self.crossings:
            return None
        lo, hi = self.crossings[0]
        return 0.5 * (lo + hi)

    def to_json(self):
        return {
            "sigma2": self.sigma2,
            "classification": self.classification,
            "crossings": [list(c) for c in self.crossings],
            "touches_origin": self.touches_origin,
            "statements": self.statements,
        }


def _bisect(f, lo, hi, f_lo, width_rel=1e-8):
    while hi - lo > width_rel * (1.0 + 0.5 * (lo + hi)):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return lo, hi


def _crossing_report(f, sigma2, config, at_zero, slope=None):
    gammas = config.grid()
    fg = np.array(grid_map(f, gammas))
    band = config.band
    touches = abs(at_zero) <= band

    if np.all(np.abs(fg) <= band):
        classification, crossings = IDENTICAL, ()
    else:
        # A certified sign change goes from below -band to above +band.
        signs = np.where(fg > band, 1, np.where(fg < -band, -1, 0))
        nz = np.flatnonzero(signs)
        changes = [(nz[k], nz[k + 1]) for k in range(nz.size - 1)
                   if signs[nz[k]] != signs[nz[k + 1]]]
        if len(changes) > 1:
            raise VerificationError(
                f"{len(changes)} sign changes of f found; at most one is possible")
        if changes:
            i, j = changes[0]
            if signs[i] > 0:
                raise VerificationError("f crosses from positive to negative")
            lo, hi = _bisect(f, gammas[i], gammas[j], fg[i])
            classification, crossings = SINGLE_CROSSING, ((float(lo), float(hi)),)
        elif np.all(signs >= 0):
            classification, crossings = NO_CROSSING_NONNEG, ()
        else:
            classification, crossings = NO_CROSSING_NEGATIVE, ()

    statements = _check_statements(gammas, fg, sigma2, band, crossings, slope)
    return CrossingReport(float(sigma2), crossings, classification, tuple(map(float, gammas)), tuple(map(float, fg)),
                          bool(touches), statements)


def _check_statements(gammas, fg, sigma2, band, crossings, slope):
    neg = fg[:-1] < -band
    rising = np.diff(fg) > 0
    s1 = bool(np.all(rising[neg]))
    if slope is not None:
        s1 = s1 and all(slope(g) > 0 for g in gammas[:-1][neg][:: max(1, neg.sum() // 20)])
    if crossings:
        after = gammas > crossings[0][1]
        s2 = bool(np.all(fg[after] >= -band))
    else:
        s2 = True
    g_end = gammas[-1]
    s3 = bool(abs(fg[-1]) <= 1.0 / g_end + sigma2 / (1.0 + sigma2 * g_end))
    out = {"increasing_where_negative": s1, "nonnegative_after_zero": s2, "vanishing_tail": s3}
    if not all(out.values()):
        raise VerificationError(f"single-crossing statements violated: {out}")
    return out


def gaussian_mmse(sigma2, gamma):
    return sigma2 / (1.0 + sigma2 * gamma)


def single_crossing(dist: InputDistribution, sigma2: float = 1.0,
                    config: GridConfig = GridConfig()) -> CrossingReport:
    """Locate sign changes of ``f(g) = sigma2/(1 + sigma2 g) - mmse(X, g)``.

    Raises :class:`VerificationError` if more than one certified crossing
    appears or if any of the three single-crossing statements fails on the
    sampled grid.
    """
    if sigma2 <= 0:
        raise DistributionError("sigma2 must be positive")

    def f(g):
        return gaussian_mmse(sigma2, g) - mmse(dist, g)

    def slope(g):
        return -mmse_derivative(dist, g, 1) - sigma2 ** 2 / (1 + sigma2 * g) ** 2

    return _crossing_report(f, sigma2, config, sigma2 - dist.variance, slope)


def conditional_single_crossing(family, sigma2: float = 1.0,
                                config: GridConfig = GridConfig()) -> CrossingReport:
    """Same as :func:`single_crossing` with the conditional MMSE given ``U``."""
    if sigma2 <= 0:
        raise DistributionError("sigma2 must be positive")
    family = list(family)

    def f(g):
        return gaussian_mmse(sigma2, g) - conditional_mmse(family, g)

    at_zero = sigma2 - sum(w * d.variance for d, w in family)
    return _crossing_report(f, sigma2, config, at_zero)


def check_gaussian_dominance(dist: InputDistribution, snr_grid) -> float:
    """Largest ``mmse(X, g) - Var/(1 + Var g)`` over the grid (never positive)."""
    var = dist.variance
    gaps = [mmse(dist, g) - gaussian_mmse(var, g) for g in snr_grid]
    return float(max(gaps))


def check_concavity(d0, d1, alpha, snr) -> float:
    """``mmse(mixture) - [alpha mmse(d0) + (1 - alpha) mmse(d1)]``."""
    if not 0 <= alpha <= 1:
        raise DistributionError("alpha must lie in [0, 1]")
    if alpha in (0, 1):
        return 0.0
    mixed = mix([(d0, alpha), (d1, 1 - alpha)])
    return mmse(mixed, snr) - (alpha * mmse(d0, snr) + (1 - alpha) * mmse(d1, snr))


def check_conditioning(family, snr) -> float:
    """``mmse(X, snr) - mmse(X, snr | U)``; conditioning can only help."""
    family = list(family)
    return mmse(mix(family), snr) - conditional_mmse(family, snr)


def check_sum_monotonicity(dist: InputDistribution, n_max: int, snr: float):
    """Gaps ``mmse(S_{n+1}) - mmse(S_n)`` for ``n = 1..n_max-1`` plus the Gaussian limit.

    Returns ``(gaps, values, gaussian_limit)``.
    """
    values = [mmse(normalized_iid_sum(dist, n), snr) for n in range(1, n_max + 1)]
    gaps = [b - a for a, b in zip(values, values[1:])]
    limit = gaussian_mmse(dist.variance, snr)
    return gaps, values, limit


def check_cosine_mix(d1, d2, alpha, snr) -> float:
    """``mmse(cos a X1 + sin a X2) - [cos^2 a mmse(X1) + sin^2 a mmse(X2)]``."""
    c, s = math.cos(alpha), math.sin(alpha)
    if abs(c) < 1e-15 or abs(s) < 1e-15:
        return 0.0
    combo = convolve(affine(d1, c, 0.0), affine(d2, s, 0.0))
    return mmse(combo, snr) - (c * c * mmse(d1, snr) + s * s * mmse(d2, snr))


def check_tv_inequality(dists, lambdas, gamma) -> float:
    """``mmse(sum X_i) - sum_i lambda_i mmse(X_{\\i} / sqrt((n-1) lambda_i))``."""
    dists, lambdas = list(dists), [float(x) for x in lambdas]
    n = len(dists)
    if n < 2 or len(lambdas) != n:
        raise DistributionError("need n >= 2 distributions and matching lambdas")
    if min(lambdas) < 0 or abs(math.fsum(lambdas) - 1) > 1e-12:
        raise DistributionError("lambdas must be a probability vector")

    def total(parts):
        out = parts[0]
        for d in parts[1:]:
            out = convolve(out, d)
        return out

    lhs = mmse(total(dists), gamma)
    rhs = 0.0
    for i, lam in enumerate(lambdas):
        if lam == 0:
            continue
        rest = total(dists[:i] + dists[i + 1:])
        rhs += lam * mmse(affine(rest, 1.0 / math.sqrt((n - 1) * lam), 0.0), gamma)
    return lhs - rhs
