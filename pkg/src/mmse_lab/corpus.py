"""Named test distributions used by the checks, the CLI and the test-suite."""

from __future__ import annotations

import math

from .distributions import (binary, gaussian_plus_binary, make_discrete, make_gaussian,
                            mix, pam)


def skewed_binary():
    """Zero-mean binary input with ``P(X = -4.95) = 0.01``."""
    return make_discrete([(0.05, 0.99), (-4.95, 0.01)])


def default_corpus():
    return {
        "gauss01": make_gaussian(0.0, 1.0),
        "gauss_quarter": make_gaussian(0.0, 0.25),
        "binary": binary(1.0),
        "skewed_binary": skewed_binary(),
        "binary_sqrt2": binary(math.sqrt(2.0)),
        "pam4": pam(4),
        "gauss_mixture": mix([(make_gaussian(-0.8, 0.36), 0.5), (make_gaussian(0.8, 0.36), 0.5)]),
        "gauss_plus_binary": gaussian_plus_binary(2.0),
        "hybrid": mix([(make_gaussian(0.3, 0.5), 0.6), (make_discrete([(-0.45, 1.0)]), 0.4)]),
    }


def unit_power_corpus():
    """Inputs with ``E[X^2] <= 1`` for the wiretap comparison."""
    return {
        "gauss01": make_gaussian(0.0, 1.0),
        "binary": binary(1.0),
        "pam4": pam(4),
        "pam8": pam(8),
        "gauss_mixture": mix([(make_gaussian(-0.8, 0.36), 0.5), (make_gaussian(0.8, 0.36), 0.5)]),
        "skewed_binary": skewed_binary(),
    }


def continuous_corpus():
    return {
        "gauss01": make_gaussian(0.0, 1.0),
        "gauss_var2": make_gaussian(0.5, 2.0),
        "gauss_mixture": mix([(make_gaussian(-1.5, 0.5), 0.5), (make_gaussian(1.5, 0.5), 0.5)]),
        "skewed_mixture": mix([(make_gaussian(0.0, 0.2), 0.8), (make_gaussian(2.0, 1.5), 0.2)]),
    }
