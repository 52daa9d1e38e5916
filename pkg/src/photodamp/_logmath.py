"""Factorials and binomial weights that stay finite for large cutoffs.

Binomial coefficients come from ``math.comb`` (exact integers). While they
fit in a double the weights are formed as ``comb * p**n * q**(k-n)``, which
keeps row sums within a few ulp of one; beyond that the product is taken in
log space.
"""
import math
from functools import lru_cache

import numpy as np
from scipy.special import xlog1py, xlogy

# C(1020, 510) ~ 1e306; past this comb() no longer converts to float
_DIRECT_LIMIT = 1020


@lru_cache(maxsize=None)
def log_factorial(n: int) -> float:
    return math.log(math.factorial(n))


@lru_cache(maxsize=None)
def log_comb(n: int, k: int) -> float:
    return math.log(math.comb(n, k))


@lru_cache(maxsize=64)
def _comb_table(size: int, log: bool) -> np.ndarray:
    # row k, column n holds C(k, n) (or its log); 0 / -inf above the diagonal
    table = np.full((size, size), -np.inf if log else 0.0)
    row = [1]
    for k in range(size):
        table[k, : k + 1] = [math.log(c) for c in row] if log else [float(c) for c in row]
        row = [1] + [row[i] + row[i + 1] for i in range(k)] + [1]
    table.setflags(write=False)
    return table


def _weights(trials, successes, p, q):
    """``C(trials, successes) p**successes q**(trials-successes)`` elementwise."""
    trials, successes = np.broadcast_arrays(trials, successes)
    size = int(trials.max()) + 1
    valid = successes <= trials
    s = np.where(valid, successes, 0)
    f = np.where(valid, trials - successes, 0)
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        if size <= _DIRECT_LIMIT:
            coeff = _comb_table(size, False)[trials, s]
            out = coeff * np.power(p, s) * np.power(q, f)
        else:
            logc = _comb_table(size, True)[trials, s]
            out = np.exp(logc + xlogy(s, p) + xlogy(f, q))
    return np.where(valid, out, 0.0)


@lru_cache(maxsize=128)
def binomial_kernel(p: float, size: int, q: float | None = None) -> np.ndarray:
    """Matrix ``K[k, n] = C(k, n) p**n q**(k-n)`` for ``0 <= n <= k < size``.

    ``q`` defaults to ``1 - p``; pass it when the complement is known more
    accurately than the subtraction gives. Entries with ``n > k`` are zero.
    The result is cached and read-only.
    """
    q = 1.0 - p if q is None else q
    k = np.arange(size)[:, None]
    n = np.arange(size)[None, :]
    kernel = _weights(k, n, p, q)
    kernel.setflags(write=False)
    return kernel


def binomial_pmf(trials: int, p: float, q: float | None = None) -> np.ndarray:
    """Binomial(trials, p) probabilities for 0..trials."""
    q = 1.0 - p if q is None else q
    return _weights(np.full(trials + 1, trials), np.arange(trials + 1), p, q)


def log_binomial_pmf(trials: int, p: float) -> np.ndarray:
    """Log-space binomial probabilities, used as a cross-check."""
    n = np.arange(trials + 1)
    logc = np.array([log_comb(trials, i) for i in range(trials + 1)])
    with np.errstate(divide="ignore"):
        return logc + xlogy(n, p) + xlog1py(trials - n, -p)
