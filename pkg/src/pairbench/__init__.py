"""Benchmarking pair-selection procedures for paired-comparison quality tests.

Six samplers (random, knockout, Swiss, tree selection, Sort-MST and
Hybrid-MST) are driven by a simulated noisy observer; Bradley-Terry scores
fitted along the way are scored against the hidden ground truth.
"""

from .errors import (
    DegenerateVarianceError,
    InvalidArgumentError,
    InvalidStateError,
    PairbenchError,
    ProtocolViolationError,
    TooFewPointsError,
    UndefinedCorrelationError,
    UnidentifiableModelError,
)
from .harness import (
    CheckpointSchedule,
    ExperimentConfig,
    MetricPoint,
    MetricSeries,
    checkpoint_schedule,
    export_results,
    load_config,
    read_results,
    run_experiment,
    run_repeat,
)
from .metrics import bootstrap_ci, pearson, rmse_aligned, spearman
from .model import (
    bt_win_probability,
    elo_update,
    fit_bt,
    sigmoid_align,
    thurstone_win_probability,
    win_matrix,
)
from .observer import GroundTruth, generate_ground_truth, simulate_comparison
from .samplers import (
    KINDS,
    Outcome,
    Pair,
    PosteriorApprox,
    expected_information_gain,
    make_sampler,
    minimum_spanning_tree,
)

__version__ = "0.1.0"
