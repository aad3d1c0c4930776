"""Kernel-smoothed specification testing for regressions whose regressor
is a unit-root or near-unit-root process.

The test compares a fitted parametric mean against the data through a
pair-weighted U-statistic that concentrates on near self-intersections
of the regressor path; self-normalization makes the null limit standard
normal.  The package also ships the simulation designs used to study
the test, estimators for the self-intersection local time of the
Gaussian limit process, and a Monte Carlo harness with a CLI.
"""

from .dgp import (
    EtaSpec,
    InnovationSpec,
    RegressorSpec,
    SamplePath,
    build_eta,
    build_regressor,
    build_response,
    draw_innovations,
    long_run_phi,
    make_sample_path,
)
from .errors import (
    DataError,
    DegenerateStatisticError,
    InvalidSpecError,
    KernspecError,
    NonFiniteDataError,
    RankDeficiencyError,
    SingularDesignError,
    ToleranceError,
)
from .harness import (
    ExperimentConfig,
    Report,
    apply_test_csv,
    emit_report,
    null_distribution_sample,
    parse_report,
    run_power,
    run_size,
)
from .kernels import Bandwidth, Kernel, bandwidth_from_exponent, get_kernel, kernel_eval, kernel_l2, kernel_moment
from .localtime import (
    FunctionalConfig,
    GaussPath,
    coupled_sup_discrepancy,
    intersection_local_time,
    occupation_identity,
    pair_functional,
    riemann_compare,
    simulate_gauss_path,
)
from .models import (
    AlternativeSpec,
    FitResult,
    NullModel,
    apply_alternative,
    fit_linear,
    fit_nls,
    get_model,
    residuals,
)
from .reference import reproduce_table
from .teststat import (
    Decomposition,
    KernelSpecTest,
    TestResult,
    TheoryNormalizers,
    decompose,
    run_test,
    self_norm_sq,
    theory_normalizers,
    u_statistic,
    z_statistic,
)

__version__ = "0.1.0"

__all__ = [
    "AlternativeSpec",
    "Bandwidth",
    "DataError",
    "Decomposition",
    "DegenerateStatisticError",
    "EtaSpec",
    "ExperimentConfig",
    "FitResult",
    "FunctionalConfig",
    "GaussPath",
    "InnovationSpec",
    "InvalidSpecError",
    "Kernel",
    "KernelSpecTest",
    "KernspecError",
    "NonFiniteDataError",
    "NullModel",
    "RankDeficiencyError",
    "RegressorSpec",
    "Report",
    "SamplePath",
    "SingularDesignError",
    "TestResult",
    "TheoryNormalizers",
    "ToleranceError",
    "apply_alternative",
    "apply_test_csv",
    "bandwidth_from_exponent",
    "build_eta",
    "build_regressor",
    "build_response",
    "coupled_sup_discrepancy",
    "decompose",
    "draw_innovations",
    "emit_report",
    "fit_linear",
    "fit_nls",
    "get_kernel",
    "get_model",
    "intersection_local_time",
    "kernel_eval",
    "kernel_l2",
    "kernel_moment",
    "long_run_phi",
    "make_sample_path",
    "null_distribution_sample",
    "occupation_identity",
    "pair_functional",
    "parse_report",
    "reproduce_table",
    "residuals",
    "riemann_compare",
    "run_power",
    "run_size",
    "run_test",
    "self_norm_sq",
    "simulate_gauss_path",
    "theory_normalizers",
    "u_statistic",
    "z_statistic",
]
