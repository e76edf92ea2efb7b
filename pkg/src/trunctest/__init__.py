"""Testing whether uniform samples on {0,1}^n were truncated by a k-junta."""

from .distributions import (
    JuntaSpec,
    JuntaTruncated,
    ParitySpec,
    ParityTruncated,
    ProblemParams,
    Uniform,
    junta_eval,
    parity_as_junta,
    random_junta,
    sample,
    sample_batch,
    tv_from_volume,
    volume,
)
from .f2core import (
    CoordSet,
    Point,
    SubspaceTrial,
    dual_weight_count,
    enumerate_weight_k,
    hamming_weight,
    log2_binom,
    parity_on,
    project,
)
from .kernels import BACKEND
from .lowerbound import (
    MleInstance,
    MomentReport,
    estimate_moments,
    mle_decide,
    mle_error_experiment,
    parity_consistent_count,
    round_T,
    subspace_trial,
)
from .testers import (
    SampleBudget,
    UniformityParams,
    Verdict,
    budget_T1,
    budget_T2,
    calibrate_alpha,
    collision_count,
    consistent_junta_check,
    distinct_pattern_count,
    junta_uniformity_test,
    uniformity_test,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CoordSet",
    "JuntaSpec",
    "JuntaTruncated",
    "MleInstance",
    "MomentReport",
    "ParitySpec",
    "ParityTruncated",
    "Point",
    "ProblemParams",
    "SampleBudget",
    "SubspaceTrial",
    "Uniform",
    "UniformityParams",
    "Verdict",
    "budget_T1",
    "budget_T2",
    "calibrate_alpha",
    "collision_count",
    "consistent_junta_check",
    "distinct_pattern_count",
    "dual_weight_count",
    "enumerate_weight_k",
    "estimate_moments",
    "hamming_weight",
    "junta_eval",
    "junta_uniformity_test",
    "log2_binom",
    "mle_decide",
    "mle_error_experiment",
    "parity_as_junta",
    "parity_consistent_count",
    "parity_on",
    "project",
    "random_junta",
    "round_T",
    "sample",
    "sample_batch",
    "subspace_trial",
    "tv_from_volume",
    "uniformity_test",
    "volume",
]
