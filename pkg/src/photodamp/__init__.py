"""Photocount statistics of a single optical mode under amplitude damping."""

__version__ = "0.1.0"

from .channel import (
    ChannelParams,
    KrausSet,
    Superoperator,
    apply_kraus,
    completeness_defect,
    evolve,
    factored_propagator,
    integrate_master_equation,
    kraus_set,
    liouvillian,
    number_state_mixture_weights,
    propagate_factored,
    propagate_vectorized,
    propagator,
)
from .errors import ConvergenceError, PhotodampError, TruncationError, ValidationError
from .fock import (
    DensityMatrix,
    StateSpec,
    annihilation_op,
    creation_op,
    matrix_exp,
    number_op,
    random_density,
    realize_state,
    validate_density,
)
from .photocount import (
    DetectorParams,
    analytic_number_damped,
    analytic_number_distribution,
    damped_distribution,
    distribution,
    effective_efficiency,
    number_damped_via_mixture,
    povm_element,
)
