import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from mmse_lab.channel import (ChannelPoint, Posterior, kernel_h, output_density,
                              posterior_mean, posterior_moment_bound, posterior_summary,
                              posterior_tail_bound)
from mmse_lab.corpus import default_corpus, skewed_binary
from mmse_lab.distributions import binary, make_discrete, make_gaussian, mix, pam, point_mass
from mmse_lab.errors import DistributionError
from mmse_lab.mmse import expect_over_y
from mmse_lab.oracle import gh_kernel_h, mc_posterior_slice

phi = stats.norm.pdf


def bayes_table(atoms, y, a):
    """Posterior of a finite input by direct application of Bayes' rule."""
    lik = np.array([p * phi(y - a * x) for x, p in atoms])
    post = lik / lik.sum()
    xs = np.array([x for x, _ in atoms])
    return xs, post, lik.sum()


def test_channel_point_validation():
    ChannelPoint.at(0.3, 2.0)
    with pytest.raises(DistributionError):
        ChannelPoint(-1.0, 1.0, 0.0)
    with pytest.raises(DistributionError):
        ChannelPoint(4.0, 1.0, 0.0)


@pytest.mark.parametrize("y,a,i", [(0.3, 0.7, 0), (-2.0, 3.0, 3), (5.0, 0.0, 2)])
def test_kernel_point_mass(y, a, i):
    c = 1.7
    assert kernel_h(point_mass(c), y, a, i) == pytest.approx(c**i * phi(y - a * c), rel=1e-14)


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 4.0])
@pytest.mark.parametrize("y", [-3.0, 0.0, 1.2])
def test_kernel_gaussian_closed_form(a, y):
    s = math.sqrt(1 + a * a)
    assert kernel_h(make_gaussian(0, 1), y, a, 0) == pytest.approx(phi(y / s) / s, rel=1e-14)


def test_kernel_binary_odd_symmetry():
    assert kernel_h(binary(), 0.0, 1.0, 1) == pytest.approx(0.0, abs=1e-17)


@pytest.mark.parametrize("name", list(default_corpus()))
@pytest.mark.parametrize("i", [0, 1, 2, 3, 4, 6])
def test_kernel_matches_gauss_hermite(name, i):
    d = default_corpus()[name]
    for y, a in [(0.4, 0.8), (-1.5, 2.0), (2.5, 0.3)]:
        assert kernel_h(d, y, a, i) == pytest.approx(gh_kernel_h(d, y, a, i), rel=1e-9, abs=1e-15)


def test_kernel_order_cap():
    with pytest.raises(DistributionError):
        kernel_h(binary(), 0.0, 1.0, 17)


def test_output_density_examples():
    assert output_density(make_gaussian(0, 1), 0.0, 1.0) == pytest.approx(1 / math.sqrt(4 * math.pi))
    for d in (binary(), pam(4), make_gaussian(2, 3)):
        assert output_density(d, 0.7, 0.0) == pytest.approx(phi(0.7), rel=1e-14)
    assert output_density(point_mass(0), 2.0, 9.0) == pytest.approx(phi(2.0), rel=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(list(default_corpus().values())), st.floats(0.01, 50))
def test_output_density_integrates_to_one(d, snr):
    val, _ = expect_over_y(d, snr, lambda p: np.ones(p.shape))
    assert val == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("snr", [0.1, 1.0, 7.0])
@pytest.mark.parametrize("y", [-2.0, 0.0, 0.9])
def test_gaussian_posterior_mean(snr, y):
    assert posterior_mean(make_gaussian(0, 1), y, snr) == pytest.approx(
        math.sqrt(snr) * y / (1 + snr), abs=1e-15)


def test_posterior_mean_special_cases():
    assert posterior_mean(binary(), 0.0, 2.0) == 0.0
    assert posterior_mean(point_mass(3.3), 1.1, 5.0) == 3.3
    assert posterior_mean(pam(4), -1.0, 0.0) == pytest.approx(0.0, abs=1e-15)
    a = math.sqrt(2.0)
    assert posterior_mean(binary(), 0.8, 2.0) == pytest.approx(math.tanh(a * 0.8), rel=1e-14)


@pytest.mark.parametrize("snr", [0.5, 3.0])
@pytest.mark.parametrize("y", [-1.0, 0.0, 2.0])
def test_gaussian_posterior_moments(snr, y):
    s = posterior_summary(make_gaussian(0, 1), y, snr, k_max=4)
    assert s.M(2) == pytest.approx(1 / (1 + snr), rel=1e-14)
    assert s.M(3) == pytest.approx(0.0, abs=1e-15)
    assert s.M(4) == pytest.approx(3 / (1 + snr) ** 2, rel=1e-14)


def test_zero_snr_summary_returns_prior_moments():
    d = skewed_binary()
    s = posterior_summary(d, 0.4, 0.0, k_max=4)
    assert s.mean == pytest.approx(d.mean, abs=1e-15)
    assert s.M(2) == pytest.approx(d.variance)
    xs = np.array([x for x, _ in d.atoms])
    ps = np.array([p for _, p in d.atoms])
    assert s.M(3) == pytest.approx(np.sum(ps * (xs - d.mean) ** 3), rel=1e-12)


@pytest.mark.parametrize("dist", [binary(), skewed_binary(), pam(4),
                                  make_discrete([(-2, 0.1), (0.5, 0.6), (3, 0.3)])])
@pytest.mark.parametrize("y,snr", [(1.0, 1.0), (-0.3, 4.0), (2.2, 0.2)])
def test_discrete_slice_against_bayes_table(dist, y, snr):
    xs, post, dens = bayes_table(dist.atoms, y, math.sqrt(snr))
    mean = np.sum(post * xs)
    s = posterior_summary(dist, y, snr, k_max=6)
    assert s.density == pytest.approx(dens, rel=1e-13)
    assert s.mean == pytest.approx(mean, rel=1e-12, abs=1e-15)
    for i in range(2, 7):
        assert s.M(i) == pytest.approx(np.sum(post * (xs - mean) ** i), rel=1e-10, abs=1e-14)


def test_binary_slice_matches_importance_sampler():
    s = posterior_summary(binary(), 1.0, 1.0, k_max=4)
    est = mc_posterior_slice(binary(), 1.0, 1.0, n_samples=200_000, seed=11)
    assert est.mean.covers(s.mean)
    for i in (2, 3, 4):
        assert est.central[i].covers(s.M(i))


def test_mixture_slice_matches_direct_integration():
    d = mix([(make_gaussian(-0.8, 0.36), 0.5), (make_gaussian(0.8, 0.36), 0.5)])
    y, a = 0.6, 1.3
    prior = lambda x: 0.5 * (stats.norm.pdf(x, -0.8, 0.6) + stats.norm.pdf(x, 0.8, 0.6))
    dens = integrate.quad(lambda x: prior(x) * phi(y - a * x), -12, 12, epsabs=1e-15)[0]
    mean = integrate.quad(lambda x: x * prior(x) * phi(y - a * x), -12, 12, epsabs=1e-15)[0] / dens
    m4 = integrate.quad(lambda x: (x - mean) ** 4 * prior(x) * phi(y - a * x), -12, 12,
                        epsabs=1e-15)[0] / dens
    s = posterior_summary(d, y, a * a, k_max=4)
    assert s.density == pytest.approx(dens, rel=1e-11)
    assert s.mean == pytest.approx(mean, rel=1e-10)
    assert s.M(4) == pytest.approx(m4, rel=1e-9)


def test_posterior_distribution_roundtrip():
    d = default_corpus()["hybrid"]
    post = Posterior(d, [0.2, -1.0], 1.5)
    law = post.distribution(1)
    assert law.mean == pytest.approx(float(post.mean[1]), rel=1e-13)
    assert law.variance == pytest.approx(float(post.central_moments(2)[0][1]), rel=1e-12)


def test_summary_order_cap():
    with pytest.raises(DistributionError):
        posterior_summary(binary(), 0.0, 1.0, k_max=9)


# ----------------------------------------------------------------- tail and moment bounds

def test_tail_bound_bounded_support():
    d = pam(4)
    radius = max(abs(x) for x, _ in d.atoms)
    for y in (-2.0, 0.0, 1.5):
        assert posterior_tail_bound(d, y, 1.0, radius * 1.01) >= 0.0
        post = Posterior(d, [y], 1.0)
        assert float(post.tail_probability(radius * 1.01)[0]) == 0.0


def test_tail_bound_gaussian():
    bound = posterior_tail_bound(make_gaussian(0, 1), 0.0, 1.0, 2.0)
    exact = 2 * stats.norm.sf(2.0 / math.sqrt(0.5))
    assert bound >= exact


def test_tail_bound_binary():
    bound = posterior_tail_bound(binary(), 0.0, 1.0, 0.5)
    exact = float(Posterior(binary(), [0.0], 1.0).tail_probability(0.5)[0])
    assert exact == pytest.approx(1.0, abs=1e-15)
    assert bound >= min(1.0, exact)


def test_tail_bound_needs_nonzero_gain():
    with pytest.raises(DistributionError):
        posterior_tail_bound(binary(), 0.0, 0.0, 1.0)


def _random_pairs(n, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-6, 6, n), rng.uniform(0.05, 5, n) * rng.choice([-1, 1], n)


@pytest.mark.parametrize("name", list(default_corpus()))
def test_tail_bound_randomized(name):
    d = default_corpus()[name]
    ys, gains = _random_pairs(1000, 5)
    for x in (0.5, 1.0, 2.5):
        for a in np.unique(np.round(gains, 1))[:40]:
            if a == 0:
                continue
            bound = posterior_tail_bound(d, ys, float(a), x)
            exact = Posterior(d, ys, float(a)).tail_probability(x)
            assert np.all(bound >= exact * (1 - 1e-12))


@pytest.mark.parametrize("name", list(default_corpus()))
def test_posterior_moment_bounds_randomized(name):
    d = default_corpus()[name]
    ys, gains = _random_pairs(1000, 9)
    for a in np.unique(np.round(gains, 1))[:40]:
        if a == 0:
            continue
        post = Posterior(d, ys, float(a))
        for n in range(1, 9):
            raw_abs = post.abs_moment(n, center=0.0)
            cen_abs = post.abs_moment(n)
            bound = posterior_moment_bound(ys, float(a), post.log_density, n)
            assert np.all(raw_abs <= bound * (1 + 1e-12))
            assert np.all(cen_abs <= 2**n * raw_abs * (1 + 1e-12) + 1e-300)


def test_abs_moment_matches_even_central():
    d = default_corpus()["gauss_plus_binary"]
    post = Posterior(d, np.linspace(-3, 3, 7), 1.1)
    m2, m3, m4 = post.central_moments(4)
    assert np.allclose(post.abs_moment(2), m2, rtol=1e-12)
    assert np.allclose(post.abs_moment(4), m4, rtol=1e-12)
    assert np.all(post.abs_moment(3) >= np.abs(m3) - 1e-15)
