"""Amplitude damping (photon loss) at zero temperature.

The master equation ``d rho/dt = kappa (2 a rho a^dag - N rho - rho N)`` is
solved four ways, which serve as cross-checks on one another:

* the Kraus sum with ``M_m = sqrt(T**m / m!) exp(-kappa t N) a**m``,
* the matrix exponential of the vectorized generator,
* the factored propagator ``exp(-kappa t (N x 1 + 1 x N)) exp(T a x a)``,
* fixed-step RK4 on the matrix ODE.

Here ``T = 1 - exp(-2 kappa t)`` is the probability that a photon is lost.

Vectorization is row-major, ``vec(rho) = rho.reshape(-1)``, for which
``vec(A rho B) = kron(A, B.T) @ vec(rho)``. The second Kronecker factor plays
the role of the fictitious companion mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._logmath import binomial_pmf, log_factorial
from .fock import (
    DensityMatrix,
    annihilation_op,
    as_density,
    matrix_exp,
    number_op,
    validate_density,
)

ODE_PSD_TOL = 1e-8


@dataclass(frozen=True)
class ChannelParams:
    """Dissipation rate ``kappa`` (1/time) and elapsed time ``t``."""

    kappa: float
    t: float

    def __post_init__(self):
        for name in ("kappa", "t"):
            val = float(getattr(self, name))
            if not (math.isfinite(val) and val >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {val!r}")
            object.__setattr__(self, name, val)

    @property
    def kt(self) -> float:
        return self.kappa * self.t

    @property
    def survival(self) -> float:
        """``exp(-2 kappa t)``, the probability that a photon survives."""
        return math.exp(-2.0 * self.kt)

    @property
    def T(self) -> float:
        """Loss probability ``1 - exp(-2 kappa t)``."""
        return -math.expm1(-2.0 * self.kt)

    @classmethod
    def from_survival(cls, survival: float, kappa: float = 1.0) -> "ChannelParams":
        """Parameters giving ``exp(-2 kappa t) == survival`` at the given rate."""
        if not 0 < survival <= 1:
            raise ValueError("survival must be in (0, 1]")
        if kappa == 0:
            return cls(0.0, 0.0)
        return cls(kappa, -math.log(survival) / (2.0 * kappa))


@dataclass(frozen=True, eq=False)
class KrausSet:
    dim: int
    m_max: int
    ops: tuple

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)


@dataclass(frozen=True, eq=False)
class Superoperator:
    """``D**2 x D**2`` matrix acting on row-major vectorized density matrices."""

    dim: int
    matrix: np.ndarray

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho)
        return (self.matrix @ vectorize(rho)).reshape(self.dim, self.dim)


def vectorize(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1)


def unvectorize(vec, dim: int) -> np.ndarray:
    return np.asarray(vec).reshape(dim, dim)


def _check_dims(rho: DensityMatrix, dim: int):
    if rho.dim != dim:
        raise ValueError(f"state has dim {rho.dim}, operator expects {dim}")


# ---------------------------------------------------------------------------
# Kraus representation


def kraus_set(params: ChannelParams, dim: int, m_max: int | None = None) -> KrausSet:
    """Kraus operators ``M_0..M_{m_max}`` on a ``dim``-level space.

    With the default ``m_max = dim - 1`` the set is complete on the truncated
    space. A smaller ``m_max`` drops the multi-photon loss branches and the
    resulting map is no longer trace preserving.
    """
    a = annihilation_op(dim)
    if m_max is None:
        m_max = dim - 1
    if not 0 <= m_max <= dim - 1:
        raise ValueError(f"m_max must lie in [0, {dim - 1}], got {m_max}")

    damp = np.exp(-params.kt * np.arange(dim))
    loss = params.T
    ops = []
    a_pow = np.eye(dim, dtype=complex)
    for m in range(m_max + 1):
        if m > 0:
            a_pow = a_pow @ a
        if m == 0:
            coeff = 1.0
        elif loss == 0.0:
            coeff = 0.0
        else:
            coeff = math.exp(0.5 * (m * math.log(loss) - log_factorial(m)))
        op = coeff * (damp[:, None] * a_pow)
        op.setflags(write=False)
        ops.append(op)
    return KrausSet(dim, m_max, tuple(ops))


def completeness_defect(ks: KrausSet) -> float:
    """``max |sum_m M_m^dag M_m - I|``."""
    total = sum(op.conj().T @ op for op in ks.ops)
    return float(np.abs(total - np.eye(ks.dim)).max())


def apply_kraus(rho0, ks: KrausSet) -> DensityMatrix:
    rho0 = as_density(rho0)
    _check_dims(rho0, ks.dim)
    r = rho0.matrix
    out = sum(op @ r @ op.conj().T for op in ks.ops)
    return validate_density(out)


# ---------------------------------------------------------------------------
# vectorized generator


def liouvillian(params: ChannelParams, dim: int) -> Superoperator:
    """Generator ``kappa (2 a x conj(a) - N x 1 - 1 x N)``; time is not folded in."""
    a = annihilation_op(dim)
    n = number_op(dim)
    eye = np.eye(dim)
    mat = params.kappa * (2.0 * np.kron(a, a.conj()) - np.kron(n, eye) - np.kron(eye, n))
    return Superoperator(dim, mat)


def propagator(params: ChannelParams, dim: int) -> Superoperator:
    """``exp(t L)`` on the doubled space."""
    gen = liouvillian(params, dim)
    return Superoperator(dim, matrix_exp(params.t * gen.matrix))


def factored_propagator(params: ChannelParams, dim: int) -> Superoperator:
    """``exp(-kappa t (N x 1 + 1 x N)) @ exp(T a x conj(a))``.

    ``a x conj(a)`` is nilpotent on the truncated doubled space, so its
    exponential is the finite sum ``sum_n T**n/n! (a x conj(a))**n``.
    """
    a = annihilation_op(dim)
    pair = np.kron(a, a.conj())
    loss = params.T

    series = np.eye(dim * dim, dtype=complex)
    term = np.eye(dim * dim, dtype=complex)
    for n in range(1, dim):
        term = term @ pair * (loss / n)
        if not term.any():
            break
        series = series + term

    levels = np.arange(dim)
    total = (levels[:, None] + levels[None, :]).reshape(-1)
    diag = np.exp(-params.kt * total)
    return Superoperator(dim, diag[:, None] * series)


def propagate_vectorized(rho0, params: ChannelParams) -> DensityMatrix:
    rho0 = as_density(rho0)
    return validate_density(propagator(params, rho0.dim).apply(rho0.matrix))


def propagate_factored(rho0, params: ChannelParams) -> DensityMatrix:
    rho0 = as_density(rho0)
    return validate_density(factored_propagator(params, rho0.dim).apply(rho0.matrix))


# ---------------------------------------------------------------------------
# RK4 on the matrix ODE


def default_steps(params: ChannelParams, dim: int) -> int:
    """Step count giving ``kappa h <= 1e-3`` and ``2 kappa (dim-1) h <= 0.04``."""
    rate = max(1000.0, 50.0 * (dim - 1))
    return max(1, math.ceil(params.kt * rate))


def _rhs(rho, a, ad, levels, kappa):
    # N rho + rho N for diagonal N is (n_i + n_j) rho_ij
    return kappa * (2.0 * (a @ rho @ ad) - levels * rho)


def integrate_master_equation(rho0, params: ChannelParams, steps: int | None = None) -> DensityMatrix:
    """Classical fixed-step RK4 from ``0`` to ``params.t``.

    The positivity check on the result is relaxed to ``-1e-8`` to allow for
    integrator error; too few steps surfaces as :class:`ValidationError`.
    """
    rho0 = as_density(rho0)
    dim = rho0.dim
    if steps is None:
        steps = default_steps(params, dim)
    if int(steps) != steps or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    rho = _rk4(rho0.matrix, params, int(steps))
    return validate_density(rho, psd_tol=ODE_PSD_TOL)


def _rk4(rho, params, steps):
    dim = rho.shape[0]
    a = annihilation_op(dim)
    ad = a.conj().T
    n = np.arange(dim, dtype=float)
    levels = n[:, None] + n[None, :]
    kappa = params.kappa
    rho = np.array(rho, dtype=complex)
    if kappa == 0.0 or params.t == 0.0:
        return rho
    h = params.t / steps
    for _ in range(steps):
        k1 = _rhs(rho, a, ad, levels, kappa)
        k2 = _rhs(rho + 0.5 * h * k1, a, ad, levels, kappa)
        k3 = _rhs(rho + 0.5 * h * k2, a, ad, levels, kappa)
        k4 = _rhs(rho + h * k3, a, ad, levels, kappa)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho


def rk4_raw(rho0, params: ChannelParams, steps: int) -> np.ndarray:
    """Unvalidated RK4 result, for convergence studies with coarse steps."""
    return _rk4(np.asarray(rho0), params, steps)


# ---------------------------------------------------------------------------
# number-state closed form


def number_state_mixture_weights(m: int, params: ChannelParams) -> np.ndarray:
    """Weights ``w[l]`` of ``|m-l><m-l|`` after damping ``|m><m|``, ``l = 0..m``.

    ``w[l] = C(m, l) T**l exp(-2 kappa t (m-l))``, a binomial distribution in
    the number of lost photons.
    """
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m!r}")
    return binomial_pmf(int(m), params.T, params.survival)


def evolve(rho0, params: ChannelParams, method: str = "kraus", steps: int | None = None) -> DensityMatrix:
    """Dispatch to one of ``kraus``, ``vectorized``, ``factored`` or ``ode``."""
    rho0 = as_density(rho0)
    if method == "kraus":
        return apply_kraus(rho0, kraus_set(params, rho0.dim))
    if method == "vectorized":
        return propagate_vectorized(rho0, params)
    if method == "factored":
        return propagate_factored(rho0, params)
    if method == "ode":
        return integrate_master_equation(rho0, params, steps)
    raise ValueError(f"unknown propagation method {method!r}")


__all__ = [
    "ChannelParams",
    "KrausSet",
    "Superoperator",
    "ODE_PSD_TOL",
    "apply_kraus",
    "completeness_defect",
    "default_steps",
    "evolve",
    "factored_propagator",
    "integrate_master_equation",
    "kraus_set",
    "liouvillian",
    "number_state_mixture_weights",
    "propagate_factored",
    "propagate_vectorized",
    "propagator",
    "rk4_raw",
    "unvectorize",
    "vectorize",
]
