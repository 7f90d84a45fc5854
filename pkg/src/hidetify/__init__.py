"""Influential-observation detection for high-dimensional regression.

Builds on expectile-centered (asymmetric) correlations: per-observation
influence is the change those correlations suffer when the observation
is added to presumed-clean row subsets. A conservative min statistic
and an aggressive max statistic are combined in an iterated two-step
sweep plus a final validation pass. Includes generators for
masking/swamping contamination benchmarks and a lasso harness to
measure the downstream effect of cleaning.
"""

__version__ = "0.1.0"

from .core_stats import (
    DEFAULT_TAUS,
    ExpectileSequence,
    asymmetric_correlation,
    asymmetric_covariance,
    asymmetric_loss,
    asymmetric_variance,
    columnwise_asymmetric_correlations,
    empirical_expectile,
)
from .downstream import (
    CoefficientMetrics,
    LassoFit,
    coefficient_metrics,
    compare_pipelines,
    fit_lasso,
    kkt_violation,
    select_lambda_cv,
)
from .errors import (
    DegenerateColumn,
    EmptyTruth,
    HidetifyError,
    InvalidLevel,
    InvalidParams,
    InvalidSample,
    ModelIIRequiresP20,
    NoConvergence,
    TooFewActive,
)
from .influence import (
    DataMatrix,
    InfluenceScore,
    SubsetFamily,
    asym_him,
    asym_t_max,
    asym_t_min,
    derive_seed,
    loo_influence,
    subset_influence,
)
from .ramm import (
    DetectionResult,
    RammParams,
    detect,
    detect_single,
    max_step,
    min_step,
    run_detector,
    validation_step,
)
from .simgen import (
    ContaminatedSample,
    ContaminationSpec,
    DetectionMetrics,
    contaminate,
    detection_metrics,
    generate_clean,
)
