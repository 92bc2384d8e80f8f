"""Exact exemplar dynamics with decaying category weights.

A system holds k category means and k positive weights over a bounded
axis-aligned box.  Each incoming point is assigned to the nearest mean
(ties to the lower index), every weight decays by exp(-decay_rate), and the
winning category absorbs the point:

    x_i <- (x_i * w_i * e^-L + z) / (w_i * e^-L + 1)
    w_i <- w_i * e^-L + 1

With decay_rate = 0 this is MacQueen's online k-means running mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError, SamplingError

DEFAULT_REJECTION_CAP = 1_000_000


def _as_points(arr, dim=None):
    """Coerce to a float64 (k, N) array of row points."""
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None] if dim in (None, 1) else a[None, :]
    if a.ndim != 2:
        raise ParameterError(f"expected a 2-d array of points, got shape {a.shape}")
    return a


def _as_point(z, dim):
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if z.shape != (dim,):
        raise ParameterError(f"point has shape {z.shape}, expected ({dim},)")
    return z


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box in R^N with non-empty interior."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=np.float64))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=np.float64))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ParameterError("domain bounds must be 1-d arrays of equal length")
        if not np.all(lo < hi):
            raise ParameterError("domain requires lower < upper in every coordinate")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def contains(self, z) -> bool:
        z = np.atleast_1d(np.asarray(z, dtype=np.float64))
        return bool(np.all(z >= self.lower) and np.all(z <= self.upper))

    def clip(self, points):
        """Clamp points (shape (..., N)) into the box."""
        return np.clip(points, self.lower, self.upper)

    def uniform_points(self, rng, n):
        """n i.i.d. uniform points, shape (n, N)."""
        u = rng.random((n, self.dim))
        return self.lower + (self.upper - self.lower) * u

    def __eq__(self, other):
        if not isinstance(other, Domain):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(
            self.upper, other.upper
        )


@dataclass(frozen=True)
class DistributionSpec:
    """How incoming points are drawn on the domain.

    kind 'uniform' uses a per-coordinate inverse transform.  kind 'density'
    wraps a strictly positive user density sampled by rejection against a
    declared envelope constant (an upper bound on the density's values).
    """

    kind: str = "uniform"
    density: object = None
    envelope: float = None
    max_attempts: int = DEFAULT_REJECTION_CAP

    def __post_init__(self):
        if self.kind not in ("uniform", "density"):
            raise ParameterError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "density":
            if not callable(self.density):
                raise ParameterError("density kind requires a callable density")
            if self.envelope is None or not (self.envelope > 0):
                raise ParameterError("density kind requires a positive envelope constant")

    @classmethod
    def uniform(cls):
        return cls(kind="uniform")

    @classmethod
    def from_density(cls, density, envelope, max_attempts=DEFAULT_REJECTION_CAP):
        return cls(kind="density", density=density, envelope=envelope,
                   max_attempts=max_attempts)


def sample(dist: DistributionSpec, domain: Domain, rng) -> np.ndarray:
    """One i.i.d. draw from ``dist`` on ``domain``; same seed, same sequence."""
    if dist.kind == "uniform":
        u = rng.random(domain.dim)
        return domain.lower + (domain.upper - domain.lower) * u
    for _ in range(dist.max_attempts):
        u = rng.random(domain.dim)
        z = domain.lower + (domain.upper - domain.lower) * u
        f = float(dist.density(z))
        if f <= 0.0:
            raise SamplingError(f"density evaluated to {f} at {z}; must be positive on the domain")
        if f > dist.envelope:
            raise SamplingError(
                f"density value {f} at {z} exceeds the declared envelope {dist.envelope}"
            )
        if rng.random() * dist.envelope < f:
            return z
    raise SamplingError(
        f"rejection sampling produced no point in {dist.max_attempts} attempts "
        f"(envelope constant {dist.envelope})"
    )


@dataclass
class SystemState:
    """Category means (k, N), positive weights (k,) and a step counter."""

    means: np.ndarray
    weights: np.ndarray
    step: int = 0

    def __post_init__(self):
        self.means = _as_points(self.means)
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=np.float64))
        if self.weights.shape[0] != self.means.shape[0]:
            raise ParameterError("means and weights must have matching category counts")
        if not np.all(self.weights > 0):
            raise ParameterError("all weights must be strictly positive")

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def copy(self) -> "SystemState":
        return SystemState(self.means.copy(), self.weights.copy(), self.step)

    def validate(self, domain: Domain):
        """Assert the state invariants against ``domain``; raises on violation."""
        if not np.all((self.means >= domain.lower) & (self.means <= domain.upper)):
            raise DomainError("a category mean left the domain")
        if not np.all(self.weights > 0):
            raise ParameterError("a category weight is not positive")


@dataclass(frozen=True)
class ModelConfig:
    """Everything that defines one exemplar system run.

    Parameters
    ----------
    k : number of categories (>= 1)
    decay_rate : per-step exponential forgetting rate (>= 0; 0 = MacQueen)
    domain, dist : where and how points arrive
    init_means : k pairwise-distinct points inside the domain
    init_weights : k strictly positive reals
    seed : 64-bit master seed; all randomness of a run derives from it
    """

    k: int
    decay_rate: float
    domain: Domain
    dist: DistributionSpec
    init_means: np.ndarray
    init_weights: np.ndarray
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "init_means", _as_points(self.init_means, self.domain.dim))
        w = np.atleast_1d(np.asarray(self.init_weights, dtype=np.float64))
        object.__setattr__(self, "init_weights", w)
        if self.k < 1:
            raise ParameterError("k must be at least 1")
        if self.decay_rate < 0:
            raise ParameterError("decay_rate must be nonnegative")
        if self.init_means.shape != (self.k, self.domain.dim):
            raise ParameterError(
                f"init_means must have shape ({self.k}, {self.domain.dim})"
            )
        if w.shape != (self.k,):
            raise ParameterError(f"init_weights must have shape ({self.k},)")
        if not np.all(w > 0):
            raise ParameterError("init_weights must all be strictly positive")
        for i in range(self.k):
            if not self.domain.contains(self.init_means[i]):
                raise DomainError(f"init_means[{i}] lies outside the domain")
            for j in range(i + 1, self.k):
                if np.array_equal(self.init_means[i], self.init_means[j]):
                    raise ParameterError(f"init_means {i} and {j} coincide")
        if not (0 <= int(self.seed) < 2**64):
            raise ParameterError("seed must fit in 64 bits")

    def initial_state(self) -> SystemState:
        return SystemState(self.init_means.copy(), self.init_weights.copy(), 0)


def classify(z, means, domain: Domain = None) -> int:
    """Index of the nearest mean to z (Euclidean), ties to the lower index."""
    means = _as_points(means)
    z = _as_point(z, means.shape[1])
    if domain is not None and not domain.contains(z):
        raise DomainError(f"point {z} lies outside the domain")
    d2 = ((means - z) ** 2).sum(axis=1)
    return int(np.argmin(d2))


def _advance(means, weights, z, decay) -> int:
    """In-place one-step update; returns the winning category index.

    All trajectory engines in the package route through this function so
    that scalar and vectorized paths produce bit-identical states.
    """
    d2 = ((means - z) ** 2).sum(axis=1)
    i = int(np.argmin(d2))
    weights *= decay
    wi = weights[i]
    means[i] = (means[i] * wi + z) / (wi + 1.0)
    weights[i] = wi + 1.0
    return i


def step(state: SystemState, z, decay_rate: float, domain: Domain = None) -> SystemState:
    """One update of the dynamics for incoming point z; returns a new state."""
    z = _as_point(z, state.dim)
    if domain is not None and not domain.contains(z):
        raise DomainError(f"point {z} lies outside the domain")
    new = state.copy()
    _advance(new.means, new.weights, z, math.exp(-decay_rate))
    new.step = state.step + 1
    return new


def total_weight(state: SystemState) -> float:
    """Sum of the category weights; follows W' = W e^-L + 1 across steps."""
    return float(state.weights.sum())


def limit_total_weight(decay_rate: float) -> float:
    """The limit 1 / (1 - e^-L) of the total weight; requires decay_rate > 0."""
    if decay_rate <= 0:
        raise ParameterError("limit total weight requires decay_rate > 0")
    return 1.0 / -math.expm1(-decay_rate)


def weight_bound(init_weights, decay_rate: float) -> float:
    """Uniform bound max(sum w0, 1/(1-e^-L)) on the total weight of a run."""
    if decay_rate <= 0:
        raise ParameterError("weight_bound requires decay_rate > 0")
    w0 = float(np.sum(np.asarray(init_weights, dtype=np.float64)))
    return max(w0, limit_total_weight(decay_rate))


class ExemplarCloud:
    """Optional bookkeeping of every stored exemplar.

    The dynamics never read the cloud; it only exists so that snapshots can
    plot the individual points.  Each exemplar carries its birth step, so the
    current weight v * e^{-L (now - birth)} is computed lazily instead of
    being decayed in place on every step.
    """

    def __init__(self, k: int, dim: int):
        self.k = k
        self.dim = dim
        self._locations = [[] for _ in range(k)]
        self._weights0 = [[] for _ in range(k)]
        self._births = [[] for _ in range(k)]

    def seed_category(self, category: int, locations, weights, birth_step: int = 0):
        """Register pre-existing exemplars for one category."""
        locations = _as_points(locations, self.dim)
        weights = np.atleast_1d(np.asarray(weights, dtype=np.float64))
        for loc, w in zip(locations, weights):
            self._locations[category].append(np.array(loc, dtype=np.float64))
            self._weights0[category].append(float(w))
            self._births[category].append(int(birth_step))

    def add(self, category: int, location, birth_step: int):
        """Record the exemplar absorbed at ``birth_step`` (weight 1 at birth)."""
        self._locations[category].append(np.array(location, dtype=np.float64))
        self._weights0[category].append(1.0)
        self._births[category].append(int(birth_step))

    def size(self, category: int = None) -> int:
        if category is None:
            return sum(len(v) for v in self._locations)
        return len(self._locations[category])

    def category_arrays(self, category: int, now: int, decay_rate: float):
        """(locations, current weights) for one category at step ``now``."""
        locs = np.array(self._locations[category], dtype=np.float64).reshape(-1, self.dim)
        w0 = np.array(self._weights0[category], dtype=np.float64)
        births = np.array(self._births[category], dtype=np.int64)
        ages = now - births
        return locs, w0 * np.exp(-decay_rate * ages)

    def weighted_means(self, now: int, decay_rate: float):
        """Per-category weighted mean and total weight of the full cloud."""
        means = np.full((self.k, self.dim), np.nan)
        totals = np.zeros(self.k)
        for j in range(self.k):
            locs, w = self.category_arrays(j, now, decay_rate)
            if locs.shape[0] == 0:
                continue
            totals[j] = w.sum()
            means[j] = (locs * w[:, None]).sum(axis=0) / totals[j]
        return means, totals

    def pruned(self, now: int, decay_rate: float, threshold: float):
        """Per-category (locations, weights) with current weight > threshold."""
        out = []
        for j in range(self.k):
            locs, w = self.category_arrays(j, now, decay_rate)
            keep = w > threshold
            out.append((locs[keep], w[keep]))
        return out
