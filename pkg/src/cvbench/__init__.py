"""cvbench: classical benchmarks for squeezed-state teleportation and storage.

Closed-form benchmark formulas, Fock-truncated ensemble operators built by
quasi-Monte Carlo, and a deterministic block-structured SDP solver with a
certified dual upper bound.
"""

from .analytic import (
    BenchmarkValue,
    coherent_gaussian_benchmark,
    ideal_overlap,
    mixed_benchmark,
    pure_benchmark,
    uhlmann_bound,
)
from .bench import (
    BenchmarkReport,
    benchmark_pipeline,
    operator_norm,
    random_separable_choi,
    sample_doubling_delta,
)
from .ensemble import (
    DeltaAtOrigin,
    EnsembleSpec,
    EtaBlocks,
    ExplicitSamples,
    GaussianIsotropic,
    build_eta,
    halton_points,
    load_eta,
    sample_displacements,
    save_eta,
    spec_to_dict,
    truncation_error,
)
from .errors import AccuracyError, DomainError, IntegrityError
from .fock import (
    FockMatrix,
    covariant_channel_overlap,
    fock_matrix,
    fock_matrix_oracle,
    rotation_average,
    squeezed_vacuum_amplitudes,
)
from .phase_space import (
    SIGMA,
    VACUUM,
    Z,
    GaussianState,
    apply_additive_noise,
    apply_attenuation,
    heterodyne_output,
    moments_from_weyl_label,
    overlap,
    rotate,
    rotation_matrix,
    squeezed_state,
)
from .sdp import (
    BlockSdp,
    SdpSolution,
    assemble_problem,
    certified_upper_bound,
    solution_to_json,
    solve,
    solve_projection,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "BenchmarkReport",
    "BenchmarkValue",
    "BlockSdp",
    "DeltaAtOrigin",
    "DomainError",
    "EnsembleSpec",
    "EtaBlocks",
    "ExplicitSamples",
    "FockMatrix",
    "GaussianIsotropic",
    "GaussianState",
    "IntegrityError",
    "SIGMA",
    "SdpSolution",
    "VACUUM",
    "Z",
    "apply_additive_noise",
    "apply_attenuation",
    "assemble_problem",
    "benchmark_pipeline",
    "build_eta",
    "certified_upper_bound",
    "coherent_gaussian_benchmark",
    "covariant_channel_overlap",
    "fock_matrix",
    "fock_matrix_oracle",
    "halton_points",
    "heterodyne_output",
    "ideal_overlap",
    "load_eta",
    "mixed_benchmark",
    "moments_from_weyl_label",
    "operator_norm",
    "overlap",
    "pure_benchmark",
    "random_separable_choi",
    "rotate",
    "rotation_average",
    "rotation_matrix",
    "sample_displacements",
    "sample_doubling_delta",
    "save_eta",
    "solution_to_json",
    "solve",
    "solve_projection",
    "spec_to_dict",
    "squeezed_state",
    "squeezed_vacuum_amplitudes",
    "truncation_error",
    "uhlmann_bound",
]
