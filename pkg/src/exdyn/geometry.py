"""Monte Carlo statistics of the nearest-mean cells.

Cell volumes and centroids are estimated by classifying uniform points, so
they work in any dimension; exact 1-D formulas live in the tests as oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, GeometryError
from .model import Domain, SystemState, _as_points


@dataclass
class CellStats:
    """Estimated cell volumes and centroids for one set of generator means.

    A cell that received no samples has volume 0 and a NaN centroid; the
    ``empty`` mask flags those cells.
    """

    volumes: np.ndarray
    centroids: np.ndarray
    counts: np.ndarray
    samples_used: int

    @property
    def empty(self) -> np.ndarray:
        return self.counts == 0


def assign_cells(points, means) -> np.ndarray:
    """Nearest-mean label for each row of ``points``, ties to the lower index.

    Same squared-distance comparison as model.classify, vectorized.
    """
    points = np.asarray(points, dtype=np.float64)
    means = _as_points(means)
    d2 = ((points[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def _check_means(means) -> np.ndarray:
    means = _as_points(means)
    k = means.shape[0]
    for i in range(k):
        for j in range(i + 1, k):
            if np.array_equal(means[i], means[j]):
                raise GeometryError(f"generator means {i} and {j} coincide")
    return means


def cell_stats(means, domain: Domain, n_samples: int, rng) -> CellStats:
    """Estimate cell volumes and centroids from n uniform sample points."""
    means = _check_means(means)
    if n_samples < 1:
        raise GeometryError("n_samples must be at least 1")
    k = means.shape[0]
    pts = domain.uniform_points(rng, n_samples)
    labels = assign_cells(pts, means)
    counts = np.bincount(labels, minlength=k)
    volumes = counts * (domain.volume / n_samples)
    sums = np.zeros((k, domain.dim))
    np.add.at(sums, labels, pts)
    centroids = np.full((k, domain.dim), np.nan)
    nonempty = counts > 0
    centroids[nonempty] = sums[nonempty] / counts[nonempty, None]
    return CellStats(volumes=volumes, centroids=centroids, counts=counts,
                     samples_used=n_samples)


def centroidal_deviation(means, domain: Domain, n_samples: int, rng) -> float:
    """max_i |mean_i - centroid(cell_i)|; 0 for a centroidal configuration.

    An empty estimated cell counts as a deviation of diam(domain), which
    downstream tests read as a collapse signal.
    """
    means = _check_means(means)
    stats = cell_stats(means, domain, n_samples, rng)
    dev = np.where(
        stats.empty,
        domain.diameter,
        np.linalg.norm(means - np.nan_to_num(stats.centroids), axis=1),
    )
    return float(dev.max())


def min_cell_volume(means, domain: Domain, n_samples: int, rng) -> float:
    """Smallest estimated cell volume; 0 when some cell caught no samples."""
    return float(cell_stats(means, domain, n_samples, rng).volumes.min())


def boundary_1d(state: SystemState) -> float:
    """Perceptual boundary (x1 + x2) / 2 of a two-category 1-D state."""
    if state.dim != 1 or state.k != 2:
        raise ContractError("boundary_1d requires a 1-D state with exactly 2 categories")
    x1, x2 = state.means[0, 0], state.means[1, 0]
    if not x1 < x2:
        raise ContractError("boundary_1d requires means ordered x1 < x2")
    return float((x1 + x2) / 2.0)
