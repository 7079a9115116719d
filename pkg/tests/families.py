"""Random finite families ``(X_u law, P(U = u))`` under the unit power constraint."""

import math

import numpy as np

from mmse_lab.distributions import affine, make_discrete, make_gaussian, mix, moment


def random_member(rng):
    kind = rng.integers(3)
    if kind == 0:
        k = int(rng.integers(2, 5))
        return make_discrete(list(zip(rng.normal(0, 1, k), rng.dirichlet(np.ones(k)))))
    if kind == 1:
        return make_gaussian(float(rng.normal(0, 0.7)), float(rng.uniform(0.05, 1.5)))
    parts = [(make_gaussian(float(rng.normal(0, 1)), float(rng.uniform(0.05, 0.6))), 0.5),
             (make_discrete([(float(rng.normal(0, 1)), 1.0)]), 0.5)]
    return mix(parts)


def random_family(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    members = [random_member(rng) for _ in range(k)]
    weights = rng.dirichlet(np.ones(k))
    power = math.fsum(w * moment(d, 2) for d, w in zip(members, weights))
    scale = math.sqrt(rng.uniform(0.5, 1.0) / power)
    members = [affine(d, scale, 0.0) for d in members]
    snr2 = float(rng.uniform(0.2, 3.0))
    snr1 = snr2 * float(rng.uniform(1.2, 6.0))
    return list(zip(members, weights.tolist())), snr1, snr2
