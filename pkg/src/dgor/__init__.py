"""Comparison of embedded treatment regimes in SMARTs with ordinal outcomes.

Core surface:

* model      — pmfs, regime models, designs, datasets, CSV schema
* engine     — exact dgor computation (two-stage, binary, K-stage)
* estimate   — MLE plug-in, concordance pairs, U-statistic
* inference  — asymptotic variance, Wald tests, sample size
* simulate   — trial generation, Monte Carlo oracle, replication studies
* policy     — sequential search for the best regime in a finite class
"""

from .engine import (
    DgorResult,
    dgor_kstage,
    dgor_matrix_form,
    dgor_shared_path,
    dgor_two_stage,
    dor_binary,
    theorem_conditions,
)
from .estimate import (
    FittedSmartModel,
    RegimeSpec,
    estimate_dgor_concordance,
    estimate_dgor_plugin,
    estimate_p_ustat,
    fit_mle,
)
from .inference import (
    DesignWeights,
    InferenceResult,
    asymptotic_variance_dp,
    asymptotic_variance_kstage,
    asymptotic_variance_sp,
    design_weights,
    inverse_normal_cdf,
    observed_weights,
    pair_design_weights,
    plan_from_models,
    sample_size,
    sample_size_from_models,
    wald_inference,
)
from .model import (
    KStageRegimeModel,
    OrdinalPmf,
    SmartDataset,
    SmartDesign,
    Trajectory,
    TwoStageRegimeModel,
    read_trajectories,
    shared_path_pair,
    small_cell_flags,
    validate_pmf,
    write_trajectories,
)
from .simulate import (
    StudyReport,
    StudyScenario,
    TrialTruth,
    barycentric_coords,
    generate_trial,
    population_dgor_oracle,
    run_study,
    truth_from_models,
)
from .policy import PolicyResult, RegimeClass, find_optimal

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
