"""Curvature invariant, Euler characteristic and metric bases for graded
Hilbert modules over the polynomial ring in d variables."""

from .polycore import (
    GaussianRational,
    Polynomial,
    evaluate,
    evaluate_exact,
    fock_inner,
    fock_weight,
    gr,
    monomials,
    q_poly,
    szego_tail_norm_sq,
    szego_truncate,
)
from .presentation import (
    DimensionTable,
    FreeModuleSpec,
    GradedPresentation,
    ModuleVector,
    PresentationError,
    defect_filtration_dims,
    graded_piece_dim,
    ideal_presentation,
    presentation_from_dict,
    presentation_to_dict,
    quotient_dims,
    validate,
)
from .hilbert import (
    GeneratingFunction,
    HilbertProfile,
    NotStabilized,
    RankSequence,
    c_invariant,
    cumulate,
    fit_hilbert_polynomial,
    generating_function,
)

__version__ = "0.1.0"
