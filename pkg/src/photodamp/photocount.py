"""Photocount statistics and their damping law.

For a detector of quantum efficiency ``xi`` the probability of registering
``n`` photoelectrons is ``Tr(rho Pi_n)`` with the normally ordered element
``Pi_n = :(xi N)**n exp(-xi N)/n!:``. On Fock states this reduces to
binomial thinning, ``<k|Pi_n|k> = C(k, n) xi**n (1-xi)**(k-n)``, which is
how the elements are built here.

Counting a state that has been through a loss channel for time ``t`` gives
the same statistics as counting the initial state with efficiency
``xi exp(-2 kappa t)``. :func:`damped_distribution` uses that shortcut;
the test suite checks it against explicit evolution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._logmath import binomial_kernel, binomial_pmf
from .channel import ChannelParams, number_state_mixture_weights
from .errors import ValidationError
from .fock import as_density

NEGATIVE_TOL = 1e-14


@dataclass(frozen=True)
class DetectorParams:
    """Quantum efficiency ``xi`` in ``[0, 1]``."""

    xi: float

    def __post_init__(self):
        xi = float(self.xi)
        if not 0.0 <= xi <= 1.0:
            raise ValueError(f"quantum efficiency must lie in [0, 1], got {self.xi!r}")
        object.__setattr__(self, "xi", xi)


def _xi(det) -> float:
    return det.xi if isinstance(det, DetectorParams) else DetectorParams(det).xi


def count_kernel(det, dim: int) -> np.ndarray:
    """``K[k, n] = <k|Pi_n|k>``; row ``k`` is the count distribution of ``|k>``."""
    return binomial_kernel(_xi(det), dim)


def povm_element(n: int, det, dim: int) -> np.ndarray:
    """Diagonal detection operator ``Pi_n`` on a ``dim``-level space."""
    if int(n) != n or not 0 <= n <= dim - 1:
        raise ValueError(f"count n must lie in [0, {dim - 1}], got {n!r}")
    return np.diag(count_kernel(det, dim)[:, int(n)]).astype(complex)


def _finish(probs: np.ndarray) -> np.ndarray:
    lowest = probs.min()
    if lowest < -NEGATIVE_TOL:
        raise ValidationError("distribution", -lowest, f"count probability dipped to {lowest:.3e}")
    return np.clip(probs, 0.0, None)


def distribution(rho, det) -> np.ndarray:
    """Count probabilities ``p(0..D-1)``; only the diagonal of ``rho`` enters."""
    rho = as_density(rho)
    return _finish(rho.populations() @ count_kernel(det, rho.dim))


def effective_efficiency(det, params: ChannelParams) -> DetectorParams:
    """Efficiency ``xi exp(-2 kappa t)`` that absorbs the channel into the detector."""
    return DetectorParams(_xi(det) * params.survival)


def damped_distribution(rho0, det, params: ChannelParams) -> np.ndarray:
    """Counts after the loss channel, computed from the *initial* state."""
    return distribution(rho0, effective_efficiency(det, params))


def _pad(probs: np.ndarray, dim: int | None) -> np.ndarray:
    if dim is None:
        return probs
    if dim < len(probs):
        raise ValueError(f"dim={dim} too small for {len(probs) - 1} photons")
    out = np.zeros(dim)
    out[: len(probs)] = probs
    return out


def analytic_number_distribution(m: int, det, dim: int | None = None) -> np.ndarray:
    """Binomial(m, xi) counts of ``|m>``, zero-padded to ``dim`` if given."""
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m!r}")
    return _pad(binomial_pmf(int(m), _xi(det)), dim)


def analytic_number_damped(m: int, det, params: ChannelParams, dim: int | None = None) -> np.ndarray:
    return analytic_number_distribution(m, effective_efficiency(det, params), dim)


def number_damped_via_mixture(m: int, det, params: ChannelParams, dim: int | None = None) -> np.ndarray:
    """Damped ``|m>`` counts by first mixing over lost photons, then counting.

    Sums ``w[l] * Binomial(m - l, xi)`` over the binomial mixture produced by
    the channel. Independent of the efficiency-rescaling shortcut.
    """
    xi = _xi(det)
    weights = number_state_mixture_weights(m, params)
    probs = np.zeros(m + 1)
    for l, w in enumerate(weights):
        probs[: m - l + 1] += w * binomial_pmf(m - l, xi)
    return _pad(probs, dim)


def mean_count(probs) -> float:
    probs = np.asarray(probs)
    return float(np.dot(np.arange(len(probs)), probs))


def poisson_pmf(mean: float, size: int) -> np.ndarray:
    """Poisson probabilities ``0..size-1`` evaluated in log space."""
    n = np.arange(size)
    if mean == 0:
        out = np.zeros(size)
        out[0] = 1.0
        return out
    logfact = np.array([math.lgamma(i + 1) for i in range(size)])
    return np.exp(-mean + n * math.log(mean) - logfact)


def geometric_pmf(mean: float, size: int) -> np.ndarray:
    """Bose-Einstein counts ``mean**n / (1 + mean)**(n+1)``."""
    n = np.arange(size)
    if mean == 0:
        out = np.zeros(size)
        out[0] = 1.0
        return out
    return np.exp(n * math.log(mean / (1.0 + mean)) - math.log1p(mean))
