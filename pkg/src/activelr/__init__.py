"""Per-parameter learning rates driven by cumulative gradient sign changes.

The adaptation loop (:mod:`activelr.core`) grows a parameter's step size
additively while its epoch-level cumulative gradients keep pointing the
same way and shrinks it multiplicatively when they disagree.  Four
first-order backbones (:mod:`activelr.backbones`) consume the resulting
per-parameter step-size vector through one shared update path, so the
constant-step and adaptive variants differ only in that vector.

Supporting pieces: analytic and synthetic objectives, a small MLP with
manual gradients, a training harness with trajectory files and sweeps,
numerical checkers for the convexity guarantees, a CLI, and a local HTTP
service backing the browser playground.
"""

from .core import (
    MODE_ABSOLUTE,
    MODE_GAIN,
    POLICY_LITERAL,
    POLICY_SKIP_ADAPT,
    ActiveConfig,
    ActiveState,
    ConstraintWarning,
    DivergenceError,
    EpochAdaptReport,
    accumulate,
    effective_alphas,
    end_epoch,
    init_active,
)
from .backbones import (
    ADABELIEF,
    ADAMW,
    KINDS,
    RADAM,
    SGD_MOMENTUM,
    BackboneConfig,
    BackboneState,
    init_backbone,
    step,
    vanilla_alphas,
)
from .objectives import (
    OBJECTIVE_NAMES,
    Objective,
    bivariate_multimodal,
    convex_quadratic,
    cubic_1d,
    minibatch_split,
    mse_line,
    named_objective,
    plot_quadratic,
    random_axis_aligned_quadratic,
    random_convex_quadratic,
    replicated,
    saddle_2d,
)
from .datasets import (
    LINEAR_REGRESSION,
    TWO_CLUSTERS,
    TWO_SPIRALS,
    Dataset,
    from_csv,
    lda_train_accuracy,
    make_synthetic_dataset,
    to_csv,
)
from .mlp import (
    CROSS_ENTROPY,
    MSE,
    Mlp,
    MlpObjective,
    MlpSpec,
    mlp_objective,
    two_clusters_task,
)
from .verification import (
    HIGH_ADD,
    HIGH_MULTIPLY,
    LOW_MULTIPLY,
    LOW_SUBTRACT,
    SignAgreementReport,
    StepAdvantageReport,
    SuiteResult,
    WalkStats,
    check_sign_agreement,
    check_step_advantage,
    finite_diff_grad,
    reports_to_json,
    sign_agreement_suite,
    simulate_lr_walk,
    step_advantage_suite,
    walk_suite,
    walk_suite_summary,
)
from .harness import (
    BATCH_GRID,
    LR_GRID,
    EpochRecord,
    IterationRecord,
    RunConfig,
    SweepCell,
    SweepReport,
    Trajectory,
    TrajectoryParseError,
    batch_size_sweep,
    lr_sensitivity_sweep,
    read_trajectory,
    run_training,
    save_sweep,
    write_trajectory,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
