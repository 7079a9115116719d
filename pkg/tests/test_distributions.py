import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import enumerate_iid_sum
from mmse_lab.corpus import skewed_binary
from mmse_lab.distributions import (affine, binary, convolve, from_json, gaussian_plus_binary,
                                    make_discrete, make_gaussian, mix, moment, moments,
                                    normalized_iid_sum, pam, point_mass)
from mmse_lab.errors import DistributionError


def test_binary_atoms():
    d = make_discrete([(-1, 0.5), (1, 0.5)])
    assert d.atoms == ((-1.0, 0.5), (1.0, 0.5))
    assert d.kind == "discrete" and d.mean == 0 and d.variance == 1


def test_point_mass_has_zero_variance():
    d = make_discrete([(0, 1.0)])
    assert d.variance == 0.0
    assert d.kind == "discrete"


def test_skewed_binary_is_zero_mean():
    d = skewed_binary()
    assert moment(d, 1) == pytest.approx(0.0, abs=1e-15)
    assert d.variance == pytest.approx(0.99 * 0.05**2 + 0.01 * 4.95**2, rel=1e-14)


@pytest.mark.parametrize("atoms", [
    [(0, 0.5), (1, 0.6)],
    [(0, -0.1), (1, 1.1)],
    [(0, math.nan)],
    [],
])
def test_invalid_weights_rejected(atoms):
    with pytest.raises(DistributionError):
        make_discrete(atoms)


def test_near_duplicate_atoms_merge():
    d = make_discrete([(1.0, 0.25), (1.0 + 1e-14, 0.25), (-1.0, 0.5)])
    assert len(d.atoms) == 2
    assert dict(d.atoms)[1.0] == pytest.approx(0.5)


@pytest.mark.parametrize("mean,var", [(0, 1), (0, 0.25), (3, 1)])
def test_gaussian_constructor(mean, var):
    d = make_gaussian(mean, var)
    assert d.kind == "gaussian"
    assert moment(d, 1) == mean
    assert moment(d, 2, central=True) == pytest.approx(var)


def test_gaussian_rejects_nonpositive_variance():
    with pytest.raises(DistributionError):
        make_gaussian(0, 0)


def test_idempotent_mixture():
    g = make_gaussian(0, 1)
    assert mix([(g, 0.5), (g, 0.5)]) == g


def test_mix_rejects_unnormalized_weights():
    with pytest.raises(DistributionError):
        mix([(binary(), 0.5), (pam(4), 0.6)])


def test_mixture_of_points_is_binary():
    assert mix([(point_mass(-1), 0.5), (point_mass(1), 0.5)]) == binary()


def test_gaussian_plus_binary_example():
    sigma2 = 3.0
    d = gaussian_plus_binary(sigma2)
    s = math.sqrt(sigma2 - 1)
    assert d.components == ((-s, 1.0, 0.5), (s, 1.0, 0.5))
    assert d.variance == pytest.approx(sigma2)


def test_affine_examples():
    assert affine(binary(), math.sqrt(2), 0) == binary(math.sqrt(2))
    d = pam(4)
    assert affine(d, 1, 0) == d
    assert affine(make_gaussian(0, 1), 0.5, 2.0) == make_gaussian(2.0, 0.25)
    assert affine(d, 0, 7) == point_mass(7)


@pytest.mark.parametrize("dist,k,expected", [
    (binary(), 4, 1.0),
    (make_gaussian(0, 1), 4, 3.0),
    (skewed_binary(), 1, 0.0),
    (make_gaussian(0, 2), 6, 15 * 8),
])
def test_moment_examples(dist, k, expected):
    assert moment(dist, k) == pytest.approx(expected, rel=1e-14, abs=1e-14)


def test_moment_cap():
    with pytest.raises(DistributionError):
        moment(binary(), 17)


def test_moment_vector():
    mv = moments(pam(4), 4)
    # Index j holds order j + 1.
    assert mv.raw[1] == pytest.approx(1.0) and mv.central[0] == 0.0
    assert mv.central[2] == pytest.approx(0.0, abs=1e-15)


def test_normalized_sum_examples():
    g = make_gaussian(0, 1)
    s5 = normalized_iid_sum(g, 5)
    assert s5.components[0][1] == pytest.approx(1.0, rel=1e-14)
    two = normalized_iid_sum(binary(), 2)
    r = math.sqrt(2)
    assert np.allclose(np.array(two.atoms), [(-r, 0.25), (0, 0.5), (r, 0.25)], atol=1e-15)
    assert normalized_iid_sum(point_mass(0), 7) == point_mass(0)


@pytest.mark.parametrize("base", [binary(), skewed_binary(), pam(4),
                                  make_discrete([(0, 0.2), (1, 0.5), (3, 0.3)])])
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_normalized_sum_matches_enumeration(base, n):
    expected = enumerate_iid_sum(base.atoms, n)
    got = normalized_iid_sum(base, n).atoms
    assert len(got) == len(expected)
    for (x, p), (ex, ep) in zip(got, expected):
        assert x == pytest.approx(ex, abs=1e-11)
        assert p == pytest.approx(ep, rel=1e-12)


@pytest.mark.parametrize("n", range(1, 13))
def test_normalized_sum_preserves_variance(n):
    for base in (binary(), skewed_binary(), make_discrete([(0, 0.2), (1, 0.8)])):
        assert normalized_iid_sum(base, n).variance == pytest.approx(base.variance, abs=1e-10)


def test_normalized_sum_cap():
    with pytest.raises(DistributionError):
        normalized_iid_sum(binary(), 13)


def test_convolve_gaussians():
    d = convolve(make_gaussian(1, 2), make_gaussian(-3, 0.5))
    assert d.mean == pytest.approx(-2) and d.variance == pytest.approx(2.5)


def test_convolve_hybrid_moments():
    a = mix([(make_gaussian(0.3, 0.5), 0.6), (point_mass(-0.45), 0.4)])
    b = pam(4)
    s = convolve(a, b)
    assert s.mean == pytest.approx(a.mean + b.mean, abs=1e-15)
    assert s.variance == pytest.approx(a.variance + b.variance, rel=1e-13)


def test_json_roundtrip(tmp_path):
    d = mix([(make_gaussian(0.3, 0.5), 0.6), (binary(), 0.4)])
    doc = d.to_json()
    assert from_json(doc) == d
    assert from_json(json.dumps(doc)) == d
    path = tmp_path / "d.json"
    path.write_text(json.dumps(doc))
    assert from_json(str(path)) == d


@pytest.mark.parametrize("bad", ['{"kind": "cauchy"}', '{"atoms": []}',
                                 '{"kind": "gaussian", "mean": 0}', "{not json"])
def test_json_errors(bad):
    with pytest.raises(DistributionError):
        from_json(bad)


# ----------------------------------------------------------------- properties

finite = st.floats(-5, 5, allow_nan=False)
atoms_st = st.lists(st.tuples(finite, st.floats(0.01, 1.0)), min_size=1, max_size=6)


def _build(atoms, gauss):
    total = sum(p for _, p in atoms)
    d = make_discrete([(x, p / total) for x, p in atoms])
    if gauss is not None:
        d = mix([(d, 0.5), (make_gaussian(gauss[0], gauss[1]), 0.5)])
    return d


dists = st.builds(_build, atoms_st,
                  st.one_of(st.none(), st.tuples(finite, st.floats(0.05, 3.0))))


@settings(max_examples=150, deadline=None)
@given(dists, st.floats(-4, 4, allow_nan=False), finite)
def test_affine_mean_property(d, a, b):
    got = moment(affine(d, a, b), 1)
    assert got == pytest.approx(a * moment(d, 1) + b, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(dists, st.floats(0.1, 3.0))
def test_affine_scales_variance(d, a):
    assert affine(d, a, 1.0).variance == pytest.approx(a * a * d.variance, rel=1e-9, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(dists, st.floats(0.01, 5)), min_size=1, max_size=4),
       st.floats(-1e-10, 1e-10))
def test_weights_normalize_exactly(parts, drift):
    total = sum(w for _, w in parts)
    d = mix([(p, w / total * (1 + drift)) for p, w in parts])
    mu, v, w = d.arrays
    assert math.fsum(w) == 1.0
    assert math.fsum([p for _, p in d.atoms] + [c[2] for c in d.components]) == 1.0
