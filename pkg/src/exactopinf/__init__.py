"""Exact nonintrusive reconstruction of projection-based reduced-order
models for polynomial dynamical systems."""

from .benchmarks import (
    BURGERS,
    CHAFEE_INFANTE,
    SHALLOW_ICE,
    BenchmarkSpec,
    build_burgers,
    build_chafee_infante,
    build_shallow_ice,
)
from .diagnostics import (
    DiagnosticsReport,
    build_report,
    condition_number,
    diffusion_spectrum,
    energy_violation,
    relative_operator_error,
    symmetry_violation,
)
from .exact_opinf import (
    InferenceResult,
    LeastSquaresResult,
    RankEnsuringPair,
    SnapshotEnsemble,
    estimate_dt,
    exact_opinf,
    extend_ensemble,
    generate_ensemble,
    infer,
    rank_ensuring_pairs,
    rank_ensuring_states,
    standard_opinf,
)
from .fom import (
    InputSignal,
    PolynomialFOM,
    SnapshotMatrix,
    eval_rhs,
    explicit_euler_step,
    from_dense_operators,
    homogeneous_part,
    implicit_euler_step,
    polarize,
    simulate,
)
from .galerkin import AggregatedOperator, intrusive_reduce, rom_rhs, rom_simulate
from .gappy_interp import (
    GappyProblem,
    gappy_interpolate,
    interpolation_matrix,
    lattice_nodes,
    univariate_specific,
)
from .pod import PodBasis, pod_basis
from .tensor_poly import (
    MonomialBasis,
    SelectionMaps,
    compress_state,
    enumerate_monomials,
    feature_matrix,
    feature_vector,
    kron_expand,
    monomial_count,
    selection_maps,
)

__version__ = "0.1.0"
