"""Numerical lab for Fourier multipliers on unimodular groups.

Group models with exact Plancherel structure, matrix-valued Fourier
transforms, generalized singular numbers of symbols, Lorentz norms of
step rearrangements, multiplier bounds with their verifiers, and the
spectral calculus of model operators.
"""
from .errors import (
    CapacityError,
    InvalidInput,
    InvalidParameter,
    LabError,
    UnderResolvedQuadrature,
    UnsupportedModel,
)
from .groups import (
    DualPoint,
    GroupModel,
    build_cyclic,
    build_euclidean_radial,
    build_heisenberg_spectral,
    build_model,
    build_su2,
    build_torus,
    enumerate_polyhedron,
    geometric_lambda_grid,
    laplacian_spectrum,
)
from .fourier import (
    GroupFunction,
    SymbolField,
    forward_transform,
    inverse_transform,
    lp_norm,
    partial_sum,
    plancherel_defect,
)
from .rearrangement import (
    StepRearrangement,
    classical_rearrangement,
    distribution_at,
    lorentz_norm,
    mu_at,
    rearrangement_of_symbol,
    sup_duality_check,
    trace_of_function,
    weak_norm,
)
from .multipliers import (
    MultiplierSpec,
    VerificationReport,
    adjoint_symbol,
    apply_multiplier,
    difference_operator,
    empirical_opnorm,
    hormander_rhs,
    lizorkin_rhs_compact,
    lizorkin_rhs_lcg,
    symbol_rhs_compact,
    verify_beta_infty,
    verify_hormander,
    verify_hyp,
    verify_lizorkin,
    verify_nikolskii,
)
from .spectral import (
    SpectralData,
    apply_spectral_function,
    embedding_constant,
    heat_decay_bound,
    heisenberg_trace_exact,
    homogeneous_symbol_trace,
    laplacian_data,
    rockland_count,
    spectral_counting,
    spectral_weak_norm,
)
from .report import emit_report, fit_decay_slope, scan_constant_stability
from .kernels import BACKEND

__version__ = "0.1.0"
