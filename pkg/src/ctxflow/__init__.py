"""ctxflow: three-path interferometer simulation and contextuality analysis."""

from .analysis import (
    ContinuityRecord,
    ContinuityReport,
    CurrentDecomposition,
    CurrentTerm,
    DetectionSample,
    InequalityReport,
    TOL_CONTINUITY,
    UndefinedPostselectionError,
    WeakValueRecord,
    context_probabilities,
    continuity_check,
    current_decomposition,
    ks_inequality,
    nx_state,
    path_probability,
    sample_detections,
    symmetric_state,
    weak_value,
    weak_value_table,
)
from .classical import Trajectory, TrajectoryReport, enumerate_trajectories, verify_classical_claim
from .hilbert import (
    Operator3,
    StateVector,
    TOL_NORM,
    TOL_UNITARY,
    TOL_ZERO,
    ZeroVectorError,
    apply,
    compose,
    inner_product,
    normalize,
    outer,
    random_state,
)
from .network import (
    BadStageError,
    BeamSplitterStage,
    Context,
    Network,
    PathLabel,
    UnknownPathError,
    canonical_network,
    contexts,
    find_context,
    full_unitary,
    load_network,
    network_from_json,
    network_hash,
    network_to_json,
    parallel_arm,
    path_state,
    propagate,
    stage_unitary,
)

__version__ = "0.1.0"
