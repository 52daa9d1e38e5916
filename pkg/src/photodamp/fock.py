"""Truncated single-mode Fock space.

Operators are dense ``(D, D)`` complex numpy arrays indexed by photon number
``0..D-1``. The canonical commutator ``[a, a^dag] = 1`` holds everywhere on
the truncated space except the ``(D-1, D-1)`` corner, which reads ``1 - D``.
Every map built in this package either lowers photon number or is diagonal,
so it sends ``span{|0>, ..., |k>}`` into itself and stays exact as long as
the input state has negligible population at the cutoff.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._logmath import log_factorial
from .errors import ConvergenceError, TruncationError, ValidationError

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
TAIL_TOL = 1e-12


def _check_dim(dim):
    if int(dim) != dim or dim < 1:
        raise ValueError(f"dimension must be a positive integer, got {dim!r}")
    return int(dim)


def annihilation_op(dim: int) -> np.ndarray:
    """Lowering operator ``a`` with ``a[k, k+1] = sqrt(k+1)``."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def creation_op(dim: int) -> np.ndarray:
    return annihilation_op(dim).conj().T


def number_op(dim: int) -> np.ndarray:
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


# ---------------------------------------------------------------------------
# density matrices


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated (Hermitian, unit-trace, PSD) truncated density matrix.

    Construct through :func:`validate_density`; the wrapped array is
    read-only.
    """

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)

    def populations(self) -> np.ndarray:
        """Photon-number distribution ``<k|rho|k>``."""
        return self.matrix.diagonal().real.copy()

    def mean_photon_number(self) -> float:
        return float(np.dot(np.arange(self.dim), self.matrix.diagonal().real))


def validate_density(op, psd_tol: float = PSD_TOL) -> DensityMatrix:
    """Check the density-matrix invariants and wrap ``op``.

    Raises :class:`ValidationError` naming the first failed check together
    with its measured defect. ``psd_tol`` bounds how negative the smallest
    eigenvalue may be.
    """
    if isinstance(op, DensityMatrix):
        return op
    mat = np.array(op, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix has non-finite entries")

    herm = np.abs(mat - mat.conj().T).max()
    if herm > HERMITICITY_TOL:
        raise ValidationError("hermiticity", herm)
    trace_defect = abs(np.trace(mat) - 1.0)
    if trace_defect > TRACE_TOL:
        raise ValidationError("trace", trace_defect)
    min_eig = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0]
    if min_eig < -psd_tol:
        raise ValidationError("positivity", -min_eig)

    mat.setflags(write=False)
    return DensityMatrix(mat)


def as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else validate_density(rho)


def random_density(dim: int, rng=None) -> DensityMatrix:
    """Ginibre-random full-rank state ``G G^dag / Tr(G G^dag)``."""
    dim = _check_dim(dim)
    rng = np.random.default_rng(rng)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return validate_density(rho / np.trace(rho).real)


# ---------------------------------------------------------------------------
# state specifications


@dataclass(frozen=True)
class StateSpec:
    """Recipe for an initial state: ``number``, ``coherent`` or ``thermal``.

    ``value`` is the photon number ``m``, the complex amplitude ``alpha`` or
    the mean photon number ``nbar`` respectively.
    """

    kind: str
    value: complex | float | int

    def __post_init__(self):
        if self.kind == "number":
            if int(self.value) != self.value or self.value < 0:
                raise ValueError(f"number state needs a nonnegative integer, got {self.value!r}")
            object.__setattr__(self, "value", int(self.value))
        elif self.kind == "coherent":
            alpha = complex(self.value)
            if not np.isfinite(alpha):
                raise ValueError("coherent amplitude must be finite")
            object.__setattr__(self, "value", alpha)
        elif self.kind == "thermal":
            nbar = float(self.value)
            if not (np.isfinite(nbar) and nbar >= 0):
                raise ValueError(f"thermal mean photon number must be >= 0, got {self.value!r}")
            object.__setattr__(self, "value", nbar)
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")

    @classmethod
    def number(cls, m: int) -> "StateSpec":
        return cls("number", m)

    @classmethod
    def coherent(cls, alpha: complex) -> "StateSpec":
        return cls("coherent", alpha)

    @classmethod
    def thermal(cls, nbar: float) -> "StateSpec":
        return cls("thermal", nbar)

    @classmethod
    def parse(cls, text: str) -> "StateSpec":
        """Parse ``number:M``, ``coherent:RE,IM`` (or ``coherent:RE``) or ``thermal:NBAR``."""
        kind, sep, arg = text.strip().partition(":")
        if not sep or not arg:
            raise ValueError(f"state must look like KIND:VALUE, got {text!r}")
        kind = kind.lower()
        if kind == "number":
            return cls.number(int(arg))
        if kind == "coherent":
            parts = [float(x) for x in arg.split(",")]
            if len(parts) == 1:
                parts.append(0.0)
            if len(parts) != 2:
                raise ValueError(f"coherent amplitude must be RE,IM, got {arg!r}")
            return cls.coherent(complex(parts[0], parts[1]))
        if kind == "thermal":
            return cls.thermal(float(arg))
        raise ValueError(f"unknown state kind {kind!r}")

    def __str__(self):
        if self.kind == "coherent":
            return f"coherent:{self.value.real!r},{self.value.imag!r}"
        return f"{self.kind}:{self.value!r}"


def _coherent_log_populations(alpha: complex, dim: int) -> np.ndarray:
    r2 = abs(alpha) ** 2
    k = np.arange(dim)
    logfact = np.array([log_factorial(i) for i in range(dim)])
    if r2 == 0.0:
        out = np.full(dim, -np.inf)
        out[0] = 0.0
        return out
    return -r2 + k * math.log(r2) - logfact


def _thermal_populations(nbar: float, dim: int) -> np.ndarray:
    if nbar == 0.0:
        out = np.zeros(dim)
        out[0] = 1.0
        return out
    k = np.arange(dim)
    return np.exp(k * math.log(nbar / (1.0 + nbar)) - math.log1p(nbar))


def realize_state(spec: StateSpec, dim: int) -> DensityMatrix:
    """Build the density matrix for ``spec`` on a ``dim``-level Fock space.

    Coherent and thermal states are renormalized after truncation; if the
    discarded tail carries more than ``1e-12`` of probability a
    :class:`TruncationError` is raised instead.
    """
    dim = _check_dim(dim)
    if spec.kind == "number":
        m = spec.value
        if m > dim - 1:
            raise TruncationError(f"number state |{m}> needs dim >= {m + 1}, got {dim}", 1.0)
        rho = np.zeros((dim, dim), dtype=complex)
        rho[m, m] = 1.0
        return validate_density(rho)

    if spec.kind == "coherent":
        alpha = spec.value
        pops = np.exp(_coherent_log_populations(alpha, dim))
        tail = max(0.0, 1.0 - pops.sum())
        if tail > TAIL_TOL:
            raise TruncationError(
                f"coherent state alpha={alpha} leaves tail mass {tail:.3e} above dim={dim}", tail
            )
        phase = np.ones(dim, dtype=complex)
        if alpha != 0:
            phase = np.exp(1j * np.angle(alpha) * np.arange(dim))
        ket = np.sqrt(pops) * phase
        ket /= np.linalg.norm(ket)
        return validate_density(np.outer(ket, ket.conj()))

    pops = _thermal_populations(spec.value, dim)
    tail = max(0.0, 1.0 - pops.sum())
    if tail > TAIL_TOL:
        raise TruncationError(
            f"thermal state nbar={spec.value} leaves tail mass {tail:.3e} above dim={dim}", tail
        )
    return validate_density(np.diag(pops / pops.sum()).astype(complex))


# ---------------------------------------------------------------------------
# matrix exponential

_TAYLOR_RADIUS = 0.5
_MAX_TERMS = 60


def matrix_exp(x) -> np.ndarray:
    """``exp(x)`` by scaling and squaring around a truncated Taylor series.

    The matrix is scaled by ``2**-s`` until its 1-norm is at most 0.5, the
    series is summed until the next term is below machine precision relative
    to the partial sum, and the result is squared ``s`` times. Diagonal
    inputs are exponentiated entrywise.
    """
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("matrix has non-finite entries")
    x = x.astype(complex) if np.iscomplexobj(x) else x.astype(float)
    n = x.shape[0]

    diag = np.diagonal(x)
    if np.count_nonzero(x - np.diag(diag)) == 0:
        return np.diag(np.exp(diag))

    norm = np.abs(x).sum(axis=0).max()
    squarings = max(0, math.ceil(math.log2(norm / _TAYLOR_RADIUS))) if norm > 0 else 0
    y = x / 2.0**squarings

    eps = np.finfo(float).eps
    result = np.eye(n, dtype=x.dtype)
    term = np.eye(n, dtype=x.dtype)
    for k in range(1, _MAX_TERMS + 1):
        term = term @ y / k
        result = result + term
        tnorm = np.abs(term).sum(axis=0).max()
        if tnorm <= eps * np.abs(result).sum(axis=0).max():
            break
    else:
        raise ConvergenceError(f"Taylor series did not converge in {_MAX_TERMS} terms")

    for _ in range(squarings):
        result = result @ result
    if not np.all(np.isfinite(result)):
        raise ConvergenceError("matrix exponential overflowed during squaring")
    return result
