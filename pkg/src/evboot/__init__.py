"""Bootstrap confidence intervals for the strength of model-selection evidence.

Evidence here is the penalized, scaled log-likelihood ratio between two
model spaces (a SIC difference by default).  The package bootstraps whole
evidence values to attach global (unconditional) and local (conditional)
intervals, smooths the replicate distribution for points and quantiles,
classifies results into strength/security categories, and ships a Monte
Carlo harness validating interval coverage under known generators.
"""

from .bootstrap import (
    BootstrapConfig,
    EvidenceSample,
    TooManyRejectionsError,
    bootstrap_evidence,
    bootstrap_evidence_pair,
    resample_rows,
)
from .classification import (
    DEFAULT_THRESHOLDS,
    EvidenceCategory,
    InvalidIntervalError,
    SecurityCategory,
    Thresholds,
    evidence_category,
    security_category,
    simulation_category,
)
from .data import Dataset, MissingValueError, load_csv
from .density import (
    DegenerateSampleError,
    QOutOfRangeError,
    SmoothedDensity,
    estimate_density,
    interval,
    smoothed_mean,
    smoothed_quantile,
)
from .evidence import (
    AIC,
    PENALTIES,
    SIC,
    EvidenceValue,
    NonFiniteLikelihoodError,
    Penalty,
    is_consistent,
    raw_evidence_global,
    raw_evidence_local,
    raw_evidence_specified,
    sic,
)
from .lincoln_petersen import (
    InsufficientSampleError,
    LPBootstrapSample,
    LPData,
    ZeroRecapturesError,
    lp_bootstrap,
    lp_capture_prob,
    lp_estimate,
    lp_intervals,
)
from .models import (
    DegenerateVarianceError,
    DimensionMismatchError,
    FittedLinearModel,
    LinearModelSpace,
    ModelError,
    RankDeficientError,
    SpecifiedModel,
    fit_mle,
    log_likelihood,
    param_count,
)
from .profile_likelihood import (
    NormalMeanProblem,
    OptimizerFailureError,
    ProfileProblem,
    RegressionSlopeProblem,
    adjusted_profile_loglik,
    et_adjusted_profile_loglik,
    implied_variance_divisor,
    profile_loglik,
)
from .simulation import (
    CASES,
    CoverageResult,
    EquidistantModelsError,
    SecurityResult,
    TopologyCase,
    get_case,
    length_ratio_sweep,
    make_design,
    run_coverage,
    run_security_tabulation,
)
from .targets import (
    GaussianLinearGenerator,
    TargetValue,
    global_target,
    kld_fixed_design,
    local_target,
    project,
)

__version__ = "0.1.0"
