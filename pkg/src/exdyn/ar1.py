"""Closed forms for the two-category uniform 1-D case.

Writing e = exp(-decay_rate), the state (x1, x2, w1, w2) linearized about its
noise-averaged fixed point (1/4, 3/4, W/2, W/2) with W = 1/(1-e) yields an
AR(1) recursion for the boundary deviation Y = b - 1/2:

    Y' = K Y + sigma * eta,   eta ~ N(0, 1)

    K     = (3 - e) / (2 (2 - e))
    sigma = (1 - e) / (4 sqrt(3) (2 - e))

All functions here require decay_rate > 0 and are only valid for the
two-category uniform system on [0, 1]; everything is pure and cheap except
simulate_ar1, which is linear in the number of steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import ParameterError
from .model import Domain, ModelConfig, _advance, limit_total_weight

INFINITE = math.inf


def _check_rate(decay_rate):
    if not decay_rate > 0:
        raise ParameterError("closed forms require decay_rate > 0")
    return float(decay_rate)


def boundary_params(decay_rate: float):
    """(K, sigma) of the boundary AR(1) recursion."""
    _check_rate(decay_rate)
    e = math.exp(-decay_rate)
    K = (3.0 - e) / (2.0 * (2.0 - e))
    sigma = (1.0 - e) / (4.0 * math.sqrt(3.0) * (2.0 - e))
    return K, sigma


def fixed_point(decay_rate: float, check: bool = True, n_nodes: int = 2048,
                tol: float = 1e-10) -> np.ndarray:
    """The state (1/4, 3/4, W/2, W/2) left fixed by the expected update.

    With check=True the returned vector is verified against a quadrature of
    the expected one-step map; the verification costs n_nodes model steps.
    """
    _check_rate(decay_rate)
    W = limit_total_weight(decay_rate)
    z = np.array([0.25, 0.75, W / 2.0, W / 2.0])
    if check:
        # residual is relative on the weight entries, which scale like 1/decay_rate
        err = np.max(np.abs(mean_map(z, decay_rate, n_nodes) - z) / np.maximum(1.0, np.abs(z)))
        if err > tol:
            raise ParameterError(
                f"fixed-point residual {err:.3e} exceeds {tol} at decay_rate={decay_rate}"
            )
    return z


def mean_map(state4, decay_rate: float, n_nodes: int = 2048) -> np.ndarray:
    """Expected one-step map E_z[step(state, z)] for z uniform on [0, 1].

    Composite midpoint quadrature applied to the exact update, with the
    node panels split at the cell boundary b = (x1 + x2)/2 where the map
    has its kink.  The update is piecewise linear in z, so the midpoint
    rule is exact up to rounding and the node count only moves the result
    at machine precision.
    """
    state4 = np.asarray(state4, dtype=np.float64)
    if state4.shape != (4,):
        raise ParameterError("state must be the 4-vector (x1, x2, w1, w2)")
    x1, x2, w1, w2 = state4
    if not 0.0 <= x1 < x2 <= 1.0:
        raise ParameterError("mean_map requires 0 <= x1 < x2 <= 1")
    b = (x1 + x2) / 2.0
    decay = math.exp(-decay_rate)

    m_left = max(1, round(n_nodes * b))
    m_right = max(1, n_nodes - m_left)
    panels = []
    if b > 0.0:
        h = b / m_left
        panels.append(((np.arange(m_left) + 0.5) * h, h))
    if b < 1.0:
        h = (1.0 - b) / m_right
        panels.append((b + (np.arange(m_right) + 0.5) * h, h))

    means = np.empty((2, 1))
    weights = np.empty(2)
    zbuf = np.empty(1)
    acc = np.zeros(4)
    for nodes, h in panels:
        terms = np.empty((len(nodes), 4))
        for row, z in enumerate(nodes):
            means[0, 0] = x1
            means[1, 0] = x2
            weights[0] = w1
            weights[1] = w2
            zbuf[0] = z
            _advance(means, weights, zbuf, decay)
            terms[row, 0] = means[0, 0]
            terms[row, 1] = means[1, 0]
            terms[row, 2] = weights[0]
            terms[row, 3] = weights[1]
        # pairwise summation keeps rounding flat even when weights ~ 1/decay_rate
        acc += h * terms.sum(axis=0)
    return acc


def linearization(decay_rate: float):
    """(J, H, Hsqrt): Jacobian of the expected map at the fixed point, the
    one-step noise covariance there, and its matrix square root."""
    _check_rate(decay_rate)
    e = math.exp(-decay_rate)
    a = (5.0 - e) / (4.0 * (2.0 - e))
    c = (1.0 - e) / (4.0 * (2.0 - e))
    J = np.array([
        [a, c, 0.0, 0.0],
        [c, a, 0.0, 0.0],
        [0.5, 0.5, e, 0.0],
        [-0.5, -0.5, 0.0, e],
    ])
    hx = (1.0 - e) ** 2 / (24.0 * (2.0 - e) ** 2)
    H = np.array([
        [hx, 0.0, 0.0, 0.0],
        [0.0, hx, 0.0, 0.0],
        [0.0, 0.0, 0.25, -0.25],
        [0.0, 0.0, -0.25, 0.25],
    ])
    s = (1.0 - e) / (math.sqrt(3.0) * (2.0 - e))
    Hsqrt = (1.0 / (2.0 * math.sqrt(2.0))) * np.array([
        [s, 0.0, 0.0, 0.0],
        [0.0, s, 0.0, 0.0],
        [0.0, 0.0, 1.0, -1.0],
        [0.0, 0.0, -1.0, 1.0],
    ])
    return J, H, Hsqrt


@dataclass(frozen=True)
class Ar1Params:
    """Everything the linearized boundary model needs, for one decay rate."""

    decay_rate: float
    K: float
    sigma: float
    W: float
    fixed_state: np.ndarray
    J: np.ndarray
    H: np.ndarray
    Hsqrt: np.ndarray

    @classmethod
    def from_decay_rate(cls, decay_rate: float, check: bool = False) -> "Ar1Params":
        K, sigma = boundary_params(decay_rate)
        J, H, Hsqrt = linearization(decay_rate)
        return cls(
            decay_rate=float(decay_rate),
            K=K,
            sigma=sigma,
            W=limit_total_weight(decay_rate),
            fixed_state=fixed_point(decay_rate, check=check),
            J=J,
            H=H,
            Hsqrt=Hsqrt,
        )

    @classmethod
    def for_config(cls, config: ModelConfig, check: bool = False) -> "Ar1Params":
        """Build params for a model config, refusing anything but the
        two-category uniform system on [0, 1]."""
        canonical = Domain(np.array([0.0]), np.array([1.0]))
        if (config.k != 2 or config.domain.dim != 1
                or config.domain != canonical
                or config.dist.kind != "uniform"):
            raise ParameterError(
                "AR(1) closed forms only exist for the 2-category uniform model on [0, 1]"
            )
        return cls.from_decay_rate(config.decay_rate, check=check)


def variance_of_Y(decay_rate: float, n) -> float:
    """Var[Y^n] of the boundary AR(1) started at Y^0 = 0.

    Equals sigma^2 (1 - K^(2n)) / (1 - K^2) for finite n; pass math.inf
    for the stationary limit sigma^2 / (1 - K^2).
    """
    K, sigma = boundary_params(decay_rate)
    if n == INFINITE:
        return sigma**2 / (1.0 - K**2)
    n = int(n)
    if n < 0:
        raise ParameterError("n must be nonnegative or math.inf")
    return sigma**2 * (1.0 - K ** (2 * n)) / (1.0 - K**2)


def stationary_autocovariance(decay_rate: float, r: int) -> float:
    """Equilibrium autocovariance sigma^2 K^|r| / (1 - K^2) at lag r."""
    K, sigma = boundary_params(decay_rate)
    return sigma**2 * K ** abs(int(r)) / (1.0 - K**2)


@dataclass(frozen=True)
class VariancePrediction:
    """A (decay_rate, n, Var[Y^n]) record, n possibly math.inf."""

    decay_rate: float
    n: float
    value: float


def variance_prediction(decay_rate: float, n) -> VariancePrediction:
    return VariancePrediction(float(decay_rate), n, variance_of_Y(decay_rate, n))


def simulate_ar1(decay_rate: float, n_steps: int, rng) -> np.ndarray:
    """Simulate Y^0 .. Y^n_steps of the boundary AR(1) from Y^0 = 0.

    Bit-deterministic for a given generator state; the recursion is run
    through scipy's lfilter, which reproduces the naive loop exactly.
    """
    K, sigma = boundary_params(decay_rate)
    if n_steps < 0:
        raise ParameterError("n_steps must be nonnegative")
    if n_steps == 0:
        return np.zeros(1)
    eta = rng.standard_normal(n_steps)
    y = lfilter([sigma], [1.0, -K], eta)
    return np.concatenate(([0.0], y))
