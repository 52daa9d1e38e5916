"""Seeded self-check suites behind ``photodamp verify``.

Each suite returns a list of :class:`Check` records (name, measured defect,
threshold). Every run is reproducible from ``(dim, seed, tol)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .channel import (
    ChannelParams,
    apply_kraus,
    completeness_defect,
    factored_propagator,
    integrate_master_equation,
    kraus_set,
    propagate_factored,
    propagate_vectorized,
    propagator,
    rk4_raw,
)
from .fock import number_op, random_density
from .photocount import (
    DetectorParams,
    count_kernel,
    damped_distribution,
    distribution,
    mean_count,
)

SUPEROPERATOR_MAX_DIM = 64
SUITES = ("damping-law", "oracles", "kraus-completeness", "factorization", "rk4-order", "povm")
XI_GRID = (0.1, 0.5, 0.9, 1.0)
KT_GRID = (0.0, 0.1, 0.7, 3.0)
ODE_TOL = 1e-8
KRAUS_TOL = 1e-12
POVM_COMPLETENESS_TOL = 1e-14
MIN_RK4_ORDER = 3.8


@dataclass
class Check:
    name: str
    defect: float
    threshold: float
    higher_is_better: bool = False

    def __post_init__(self):
        self.defect = float(self.defect)
        self.threshold = float(self.threshold)

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.defect):
            return False
        if self.higher_is_better:
            return bool(self.defect >= self.threshold)
        return bool(self.defect <= self.threshold)

    def as_dict(self):
        out = asdict(self)
        out["passed"] = self.passed
        return out


def damping_law(dim, seed, tol, n_states=20):
    """Evolve-then-count versus count-with-rescaled-efficiency."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_states):
        rho0 = random_density(dim, rng)
        for kt in KT_GRID:
            params = ChannelParams(1.0, kt)
            rho_t = apply_kraus(rho0, kraus_set(params, dim))
            for xi in XI_GRID:
                det = DetectorParams(xi)
                diff = np.abs(distribution(rho_t, det) - damped_distribution(rho0, det, params))
                worst = max(worst, diff.max())
    return [Check("damping-law", worst, tol)]


def oracles(dim, seed, tol, n_states=3):
    rng = np.random.default_rng(seed)
    worst = {"kraus-vs-vectorized": 0.0, "kraus-vs-factored": 0.0, "kraus-vs-ode": 0.0}
    for _ in range(n_states):
        rho0 = random_density(dim, rng)
        params = ChannelParams(rng.uniform(0.1, 2.0), rng.uniform(0.0, 1.5))
        ref = apply_kraus(rho0, kraus_set(params, dim)).matrix
        for key, other in (
            ("kraus-vs-vectorized", propagate_vectorized(rho0, params).matrix),
            ("kraus-vs-factored", propagate_factored(rho0, params).matrix),
            ("kraus-vs-ode", integrate_master_equation(rho0, params).matrix),
        ):
            worst[key] = max(worst[key], np.abs(ref - other).max())
    return [
        Check(name, defect, max(tol, ODE_TOL) if name.endswith("ode") else tol)
        for name, defect in worst.items()
    ]


def kraus_completeness(dim, seed, tol):
    threshold = min(tol, KRAUS_TOL)
    return [
        Check(f"kraus-completeness[kt={kt}]", completeness_defect(kraus_set(ChannelParams(1.0, kt), dim)), threshold)
        for kt in (0.1, 0.7, 3.0)
    ]


def factorization(dim, seed, tol):
    checks = []
    for kt in (0.2, 1.0, 4.0):
        params = ChannelParams(1.0, kt)
        gap = np.abs(propagator(params, dim).matrix - factored_propagator(params, dim).matrix).max()
        checks.append(Check(f"factorization[kt={kt}]", gap, tol))
    return checks


def rk4_order(dim, seed, tol):
    """Observed order from one step halving against the exact propagator."""
    # keep h * 2 kappa (dim - 1) well inside the asymptotic regime
    base = max(32, 4 * (dim - 1))
    steps = (base, 2 * base)
    rho0 = random_density(dim, seed)
    params = ChannelParams(1.0, 1.0)
    exact = propagate_vectorized(rho0, params).matrix
    coarse, fine = (np.abs(rk4_raw(rho0.matrix, params, s) - exact).max() for s in steps)
    order = math.log2(coarse / fine) if fine > 0 else float("inf")
    return [Check("rk4-order", order, MIN_RK4_ORDER, higher_is_better=True)]


def povm(dim, seed, tol, n_states=10):
    rng = np.random.default_rng(seed)
    completeness = 0.0
    for xi in (0.0, *XI_GRID, 0.37):
        completeness = max(completeness, np.abs(count_kernel(xi, dim).sum(axis=1) - 1.0).max())
    norm = mean_law = 0.0
    n_op = number_op(dim)
    for _ in range(n_states):
        rho = random_density(dim, rng)
        xi = rng.uniform()
        probs = distribution(rho, xi)
        norm = max(norm, abs(probs.sum() - 1.0))
        expected = xi * np.trace(rho.matrix @ n_op).real
        mean_law = max(mean_law, abs(mean_count(probs) - expected))
    return [
        Check("povm-completeness", completeness, min(tol, POVM_COMPLETENESS_TOL)),
        Check("povm-normalization", norm, tol),
        Check("povm-mean-count", mean_law, tol),
    ]


_RUNNERS = {
    "damping-law": damping_law,
    "oracles": oracles,
    "kraus-completeness": kraus_completeness,
    "factorization": factorization,
    "rk4-order": rk4_order,
    "povm": povm,
}


def run_suite(suite: str, dim: int, seed: int = 0, tol: float = 1e-10) -> list[Check]:
    if suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if suite in ("oracles", "factorization") and dim > SUPEROPERATOR_MAX_DIM:
        raise ValueError(f"suite {suite!r} builds D^2 x D^2 matrices; dim must be <= {SUPEROPERATOR_MAX_DIM}")
    return _RUNNERS[suite](dim, seed, tol)
