"""Input distributions: finite discrete laws, Gaussian mixtures and hybrids.

Every law handled by the library is a finite mixture of point masses and
Gaussian components. The class is closed under shifts, scalings, mixtures
and independent sums, which is all the rest of the package needs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DistributionError

MAX_MOMENT = 16
MAX_ATOMS = 10**6
MERGE_TOL = 1e-12
WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class MomentVector:
    """Raw moments ``E[X^k]`` and central moments ``m_k`` for ``k = 1..K``."""

    raw: tuple
    central: tuple

    def __post_init__(self):
        if self.central and abs(self.central[0]) > 1e-12 * max(1.0, abs(self.raw[0])):
            raise DistributionError("first central moment must vanish")
        if len(self.central) > 1 and self.central[1] < 0:
            raise DistributionError("variance must be non-negative")


@dataclass(frozen=True)
class InputDistribution:
    """A mixture of point masses and Gaussian components.

    ``atoms`` holds ``(location, weight)`` pairs sorted by location;
    ``components`` holds ``(mean, variance, weight)`` triples with strictly
    positive variance. Weights across both lists sum to one.
    """

    atoms: tuple = ()
    components: tuple = ()
    _arrays: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = tuple((float(x), float(p)) for x, p in self.atoms)
        comps = tuple((float(m), float(v), float(p)) for m, v, p in self.components)
        if not atoms and not comps:
            raise DistributionError("distribution has no mass")
        locs = [x for x, _ in atoms]
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise DistributionError("atom locations must be strictly increasing")
        if any(v <= 0 for _, v, _ in comps):
            raise DistributionError("mixture component variances must be positive")
        weights = [p for _, p in atoms] + [p for *_, p in comps]
        if any(p < 0 for p in weights):
            raise DistributionError("weights must be non-negative")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise DistributionError("weights must sum to 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "components", comps)
        means = np.array(locs + [m for m, _, _ in comps])
        variances = np.array([0.0] * len(atoms) + [v for _, v, _ in comps])
        object.__setattr__(self, "_arrays", (means, variances, np.array(weights)))

    @property
    def kind(self) -> str:
        if not self.components:
            return "discrete"
        if not self.atoms and len(self.components) == 1:
            return "gaussian"
        return "gaussian_mixture"

    @property
    def is_continuous(self) -> bool:
        return not self.atoms

    @property
    def arrays(self):
        """``(means, variances, weights)`` with atoms as zero-variance entries."""
        return self._arrays

    @property
    def mean(self) -> float:
        return moment(self, 1)

    @property
    def variance(self) -> float:
        return moment(self, 2, central=True)

    def support_radius(self) -> float:
        """Largest ``|x|`` among atoms; ``inf`` when Gaussian parts exist."""
        if self.components:
            return math.inf
        return max(abs(x) for x, _ in self.atoms)

    def to_json(self) -> dict:
        parts = []
        if self.kind == "discrete":
            return {"kind": "discrete", "atoms": [list(a) for a in self.atoms]}
        if self.kind == "gaussian":
            m, v, _ = self.components[0]
            return {"kind": "gaussian", "mean": m, "variance": v}
        for x, p in self.atoms:
            parts.append({"dist": {"kind": "discrete", "atoms": [[x, 1.0]]}, "weight": p})
        for m, v, p in self.components:
            parts.append({"dist": {"kind": "gaussian", "mean": m, "variance": v},
                          "weight": p})
        return {"kind": "mixture", "parts": parts}


def _canonical(atoms, components) -> InputDistribution:
    """Sort, merge near-duplicates, drop zero weights and renormalize."""
    atoms = sorted((x, p) for x, p in atoms if p > 0)
    merged = []
    for x, p in atoms:
        if merged and abs(x - merged[-1][0]) <= MERGE_TOL * max(1.0, abs(x)):
            x0, p0 = merged[-1]
            merged[-1] = (x0, p0 + p)
        else:
            merged.append((x, p))
    comps = {}
    for m, v, p in components:
        if p <= 0:
            continue
        key = (round(m, 12), round(v, 12))
        if key in comps:
            m0, v0, p0 = comps[key]
            comps[key] = (m0, v0, p0 + p)
        else:
            comps[key] = (m, v, p)
    comps = sorted(comps.values())
    total = math.fsum([p for _, p in merged] + [p for *_, p in comps])
    if total <= 0:
        raise DistributionError("distribution has no mass")
    merged = tuple((x, p / total) for x, p in merged)
    comps = tuple((m, v, p / total) for m, v, p in comps)
    # Pin the sum to exactly one by absorbing rounding into the heaviest entry.
    weights = [p for _, p in merged] + [p for *_, p in comps]
    drift = 1.0 - math.fsum(weights)
    if drift:
        k = int(np.argmax(weights))
        if k < len(merged):
            x, p = merged[k]
            merged = merged[:k] + ((x, p + drift),) + merged[k + 1:]
        else:
            j = k - len(merged)
            m, v, p = comps[j]
            comps = comps[:j] + ((m, v, p + drift),) + comps[j + 1:]
    return InputDistribution(merged, comps)


def _check_weights(weights):
    if any(not math.isfinite(p) or p < 0 for p in weights):
        raise DistributionError("weights must be finite and non-negative")
    total = math.fsum(weights)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise DistributionError(f"weights sum to {total!r}, not 1")


def make_discrete(atoms) -> InputDistribution:
    """Finite discrete law from ``(location, probability)`` pairs.

    >>> make_discrete([(-1, 0.5), (1, 0.5)]).variance
    1.0
    """
    atoms = [(float(x), float(p)) for x, p in atoms]
    if not atoms:
        raise DistributionError("empty atom list")
    if any(not math.isfinite(x) for x, _ in atoms):
        raise DistributionError("atom locations must be finite")
    _check_weights([p for _, p in atoms])
    return _canonical(atoms, ())


def make_gaussian(mean: float, variance: float) -> InputDistribution:
    if not (math.isfinite(mean) and math.isfinite(variance)):
        raise DistributionError("Gaussian parameters must be finite")
    if variance <= 0:
        raise DistributionError("Gaussian variance must be positive; use a point mass")
    return InputDistribution((), ((float(mean), float(variance), 1.0),))


def point_mass(c: float) -> InputDistribution:
    return make_discrete([(c, 1.0)])


def mix(parts) -> InputDistribution:
    """Mixture ``sum_j w_j P_j`` of distributions, flattened to one level."""
    parts = list(parts)
    if not parts:
        raise DistributionError("empty mixture")
    _check_weights([float(w) for _, w in parts])
    atoms, comps = [], []
    for d, w in parts:
        atoms += [(x, w * p) for x, p in d.atoms]
        comps += [(m, v, w * p) for m, v, p in d.components]
    return _canonical(atoms, comps)


def affine(dist: InputDistribution, a: float, b: float) -> InputDistribution:
    """Law of ``a X + b``. A zero ``a`` collapses everything to a point mass."""
    if a == 0:
        return point_mass(b)
    atoms = [(a * x + b, p) for x, p in dist.atoms]
    comps = []
    for m, v, p in dist.components:
        # A tiny scale can underflow the variance; the component is then an atom.
        if a * a * v > 0:
            comps.append((a * m + b, a * a * v, p))
        else:
            atoms.append((a * m + b, p))
    if a == 1 and b == 0:
        return dist
    return _canonical(atoms, comps)


def convolve(d1: InputDistribution, d2: InputDistribution,
             max_atoms: int = MAX_ATOMS) -> InputDistribution:
    """Law of ``X1 + X2`` for independent ``X1 ~ d1``, ``X2 ~ d2``."""
    m1, v1, w1 = d1.arrays
    m2, v2, w2 = d2.arrays
    if m1.size * m2.size > max_atoms * 4:
        raise DistributionError("convolution exceeds the atom cap")
    means = (m1[:, None] + m2[None, :]).ravel()
    varis = (v1[:, None] + v2[None, :]).ravel()
    weights = (w1[:, None] * w2[None, :]).ravel()
    is_atom = varis == 0
    atoms = _merge_sorted(means[is_atom], weights[is_atom])
    if len(atoms) > max_atoms:
        raise DistributionError(
            f"convolution produces {len(atoms)} atoms, above cap {max_atoms}")
    comps = list(zip(means[~is_atom], varis[~is_atom], weights[~is_atom]))
    return _canonical(atoms, comps)


def _merge_sorted(locs, weights):
    # Fast path for large atom sets before the generic canonicalization.
    if locs.size == 0:
        return []
    order = np.argsort(locs, kind="stable")
    locs, weights = locs[order], weights[order]
    gap = np.diff(locs) > MERGE_TOL * np.maximum(1.0, np.abs(locs[1:]))
    group = np.concatenate([[0], np.cumsum(gap)])
    out_w = np.bincount(group, weights=weights)
    first = np.concatenate([[True], gap])
    return list(zip(locs[first].tolist(), out_w.tolist()))


def normalized_iid_sum(dist: InputDistribution, n: int,
                       max_atoms: int = MAX_ATOMS) -> InputDistribution:
    """Exact law of ``(X_1 + ... + X_n) / sqrt(n)`` for i.i.d. ``X_i ~ dist``."""
    if n < 1 or int(n) != n:
        raise DistributionError("n must be a positive integer")
    if dist.atoms and dist.components == () and n > 12 and len(dist.atoms) > 1:
        raise DistributionError("discrete i.i.d. sums are limited to n <= 12")
    total = dist
    for _ in range(int(n) - 1):
        total = convolve(total, dist, max_atoms=max_atoms)
    return affine(total, 1.0 / math.sqrt(n), 0.0)


def gaussian_moment(k: int) -> float:
    """``E[Z^k]`` for standard normal ``Z``: ``(k-1)!!`` for even ``k``."""
    if k % 2:
        return 0.0
    return float(math.prod(range(k - 1, 0, -2))) if k else 1.0


def _raw_moment(dist: InputDistribution, k: int, shift: float = 0.0) -> float:
    terms = [p * (x - shift) ** k for x, p in dist.atoms]
    for m, v, p in dist.components:
        c = m - shift
        s = math.sqrt(v)
        terms.append(p * math.fsum(
            math.comb(k, j) * c ** (k - j) * s ** j * gaussian_moment(j)
            for j in range(0, k + 1, 2)))
    return math.fsum(terms)


def moment(dist: InputDistribution, k: int, central: bool = False) -> float:
    """Raw moment ``E[X^k]`` or central moment ``E[(X - EX)^k]`` (exact)."""
    if k < 0 or int(k) != k:
        raise DistributionError("moment order must be a non-negative integer")
    if k > MAX_MOMENT:
        raise DistributionError(f"moment order {k} above cap {MAX_MOMENT}")
    if k == 0:
        return 1.0
    if central:
        if k == 1:
            return 0.0
        return _raw_moment(dist, k, shift=_raw_moment(dist, 1))
    return _raw_moment(dist, k)


def moments(dist: InputDistribution, kmax: int = 4) -> MomentVector:
    raw = tuple(moment(dist, k) for k in range(1, kmax + 1))
    central = tuple(moment(dist, k, central=True) for k in range(1, kmax + 1))
    return MomentVector(raw, central)


def from_json(source) -> InputDistribution:
    """Parse the JSON distribution schema (dict, JSON text or file path)."""
    if isinstance(source, (str, Path)):
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(text).read_text()
        try:
            source = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DistributionError(f"invalid distribution JSON: {exc}") from exc
    if not isinstance(source, dict) or "kind" not in source:
        raise DistributionError("distribution JSON needs a 'kind' field")
    kind = source["kind"]
    try:
        if kind == "discrete":
            return make_discrete([tuple(a) for a in source["atoms"]])
        if kind == "gaussian":
            return make_gaussian(float(source["mean"]), float(source["variance"]))
        if kind == "mixture":
            return mix([(from_json(p["dist"]), float(p["weight"])) for p in source["parts"]])
    except (KeyError, TypeError) as exc:
        raise DistributionError(f"malformed {kind!r} distribution: {exc}") from exc
    raise DistributionError(f"unknown distribution kind {kind!r}")


def binary(amplitude: float = 1.0) -> InputDistribution:
    """Equiprobable ``+-amplitude``."""
    return make_discrete([(-amplitude, 0.5), (amplitude, 0.5)])


def pam(levels: int) -> InputDistribution:
    """Equiprobable PAM constellation scaled to unit power."""
    pts = np.arange(levels) * 2.0 - (levels - 1)
    pts = pts / math.sqrt(np.mean(pts ** 2))
    return make_discrete([(x, 1.0 / levels) for x in pts])


def gaussian_plus_binary(sigma2: float) -> InputDistribution:
    """``Z + sqrt(sigma2 - 1) B`` with ``Z ~ N(0,1)`` and ``B = +-1`` equiprobable."""
    if sigma2 <= 1:
        raise DistributionError("sigma2 must exceed 1")
    b = math.sqrt(sigma2 - 1.0)
    return mix([(make_gaussian(-b, 1.0), 0.5), (make_gaussian(b, 1.0), 0.5)])


def lattice(locs, weights) -> InputDistribution:
    """Discrete law from arrays; weights are renormalized."""
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    return make_discrete(list(zip(np.asarray(locs, dtype=float).tolist(), weights.tolist())))
