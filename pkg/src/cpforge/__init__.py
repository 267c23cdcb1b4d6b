"""Complete-positivity checks and asymmetric-depolarizer repair for small quantum maps."""

from .channel_rep import (
    Channel,
    DensityMatrix,
    apply,
    choi_matrix,
    compose,
    extend_local,
    extend_local_kraus,
    is_cp,
    naive_extension,
)
from .errors import (
    CPForgeError,
    DimensionMismatch,
    DomainError,
    NoSolution,
    NonHermitianInput,
    ParamOutOfRange,
    ParseError,
    UnsupportedK,
    WeightSumError,
)
from .iso import ebit_merge_unitary, gellmann_form, pauli_form
from .maps import (
    DepolarizerParams,
    TranslationParams,
    adm,
    completely_depolarizing,
    fujiwara_algoet_valid,
    invert,
    robust_map,
    symmetric_depolarizer,
    translation,
)
from .measures import (
    bloch_vector,
    fidelity_vs_input,
    fidelity_vs_map_output,
    linear_entropy,
    m1,
    pauli_diamond_distance,
    pauli_weights,
)
from .optimizer import (
    ConstraintMode,
    ObjectiveKind,
    OptimizationResult,
    SearchConfig,
    SignMode,
    feasibility,
    nonzero_witness,
    optimal_symmetric_tau,
    optimize_adm,
    theorem2_witness,
)

__version__ = "0.1.0"
