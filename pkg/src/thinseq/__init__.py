"""Thinness profiles and interpolation/embedding constants for sequences
in the unit disk: pseudohyperbolic geometry, inner functions, Szego and
model-space kernels, Gram frame bounds, Carleson-type embedding constants,
minimal-norm and iterative interpolation, and Earl/dual-system bounds."""

from .diskgeom import (
    BlaschkeSequence,
    DegenerateSequenceError,
    DeltaEntry,
    DeltaProfile,
    GapPoint,
    NonInterpolatingError,
    SequenceSpec,
    blaschke_factor,
    delta_profile,
    generate_sequence,
    pseudo_distance,
)
from .inner import (
    AtomicSingular,
    FiniteBlaschke,
    InnerFunction,
    InnerValue,
    TruncatedBlaschke,
    monomial,
    tail_kappa,
    truncated_blaschke,
)
from .kernels import (
    GramWindow,
    KernelCombination,
    KernelFamily,
    build_gram,
    hardy_family,
    model_family,
    model_inner,
    model_kernel,
    project_model,
    szego_inner,
    szego_kernel,
)
from .spectral import (
    ConvergenceError,
    ExtremalEigen,
    RieszBounds,
    extremal_eigs,
    jacobi_eigh,
    riesz_bounds,
)
from .carleson import (
    DiscreteMeasure,
    GridSpec,
    carleson_constant,
    mu_measure,
    nu_measure,
    reproducing_constant,
    sigma_measure,
    weierstrass_gap,
)
from .interpolation import (
    InterpolationProblem,
    IterationTrace,
    MinNormSolution,
    NearSingularError,
    SolverContractViolation,
    eis_constant,
    exact_solver,
    h2_to_model_transfer,
    iterative_solve,
    min_norm_interpolant,
    scaled_solver,
)
from .earl import (
    BeurlingSystem,
    BoundedInterpolant,
    beurling_functions,
    earl_bound,
    interpolate_bounded,
)

__version__ = "0.1.0"
