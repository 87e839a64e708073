"""Coded batch matrix multiplication over a prime field, with a
fault-injection master-worker simulator and op-count benchmarks."""

from .field import (
    M61,
    DimensionMismatch,
    FieldError,
    FieldMatrix,
    OpCounter,
    PrimeField,
    SingularMatrix,
    field_pow,
    mat_add,
    mat_mul,
    mat_random,
    mat_scale,
    mat_sub,
    solve_linear,
)
from .exponents import (
    ExponentPair,
    ParameterSearchExhausted,
    SearchBudgetExceeded,
    SumSupport,
    base3_exponents,
    behrend_exponents,
    is_3ap_free,
    is_decodable,
    min_recovery_bruteforce,
    poly_code_exponents,
    sum_support,
)
from .rook import (
    DuplicateEvaluationPoint,
    NotEnoughProducts,
    RookScheme,
    SingularAfterRetry,
    WorkerProduct,
    WorkerShare,
    gap_powers,
    make_rook_scheme,
    rook_decode,
    rook_encode_share,
    rook_recovery_threshold,
    rook_worker,
)
from .baselines import (
    ALL_SCHEMES,
    CsaScheme,
    LccScheme,
    PoleEvaluation,
    ReplicationScheme,
    SchemeDescriptor,
    UncoveredPair,
    csa_decode,
    csa_encode,
    lcc_decode,
    lcc_encode,
    make_csa_scheme,
    make_lcc_scheme,
    replication_run,
    scheme_threshold,
)
from .sim import ConfigInvalid, FaultModel, SimConfig, SimReport, run_simulation, sweep, sweep_to_csv

__version__ = "0.1.0"
