"""Modewise compression operators and iterative hard thresholding recovery
for tensors with low multilinear rank."""

from .tensor import (
    ReshapePlan,
    inner,
    kron,
    kron_all,
    mode_product,
    multi_mode_product,
    norm,
    outer_product,
    reshape_flatten,
    reshape_unflatten,
    unfold,
    unvect,
    vect,
)
from .decomposition import (
    TuckerDecomposition,
    check_orthogonal_subtensors,
    hosvd,
    multilinear_rank,
    random_low_rank,
    truncate_rank,
)
from .measurement import (
    ModewiseOperator,
    MeasurementOperator,
    NoisyMeasurement,
    SorsEnsemble,
    TwoStageOperator,
    VectorizedOperator,
    dct_matrix,
    dct_rows,
    load_operator,
    make_gaussian,
    make_sors,
    measure,
    save_operator,
)
from .tiht import ContractionReport, TihtConfig, TihtResult, contraction_certificate, tiht_recover
from .rip import (
    BoundReport,
    DistortionEstimate,
    coherence_check,
    dudley_estimate,
    dudley_integrand,
    estimate_distortion,
    eval_covering_bound,
    eval_m_bound,
    image_coherence,
    relative_distortion,
    sample_s1,
    sample_s2,
    sample_s2_pair,
)
from .harness import (
    CellRow,
    ExperimentReport,
    ExperimentSpec,
    build_operator,
    derive_seed,
    parse_config,
    read_report_json,
    rows_to_csv,
    run_experiment,
    run_trial,
    write_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
