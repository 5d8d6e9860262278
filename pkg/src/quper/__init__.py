"""quper: permutation-spanning variational circuits and the QuPer heuristic."""

from .gf2 import (
    AffineMap,
    BruhatFactors,
    Gf2Matrix,
    Permutation,
    Transvection,
    borel_subword,
    bruhat_decompose,
    bruhat_order_leq,
    bruhat_span_size,
    recognize_affine,
    word_to_matrix,
)
from .circuits import (
    Circuit,
    CircuitStats,
    Gate,
    QubitBudgetError,
    build_ansatz,
    circuit_stats,
    eval_permutation,
    eval_unitary,
    lower_to_linear_topology,
    solver_ansatz,
    synthesize_params,
)
from .dsm import (
    BirkhoffDecomposition,
    Dsm,
    DsmJob,
    birkhoff_decompose,
    extract_dsm,
    statevector_oracle,
)
from .projection import best_projection, project_hungarian, project_random_order
from .optimizer import (
    AdamState,
    LossConfig,
    QuperConfig,
    QuperTrace,
    adam_nesterov_step,
    fd_gradient,
    loss,
    quper_solve,
    random_baseline,
    regularizers,
)
from .problems import (
    GipInstance,
    QapInstance,
    gip_cost,
    gip_to_qap,
    load_qaplib,
    parse_qaplib,
    parse_sln,
    qap_cost,
    random_gip,
    random_qap,
)

__all__ = [name for name in dir() if not name.startswith("_")]
