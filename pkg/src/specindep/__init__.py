"""Spectral portmanteau tests of independence between two long-memory series."""
from importlib.metadata import PackageNotFoundError, version as _version

from .exceptions import (
    ConfigurationError,
    DegenerateInputError,
    InvalidInputError,
    InvalidSpecError,
    SingularModelError,
)
from .models import (
    FarimaParams,
    FarimaVariant,
    FarParams,
    far_spectral_density,
    farima_spectral_density,
    frac_diff_coeffs,
    is_stationary,
)
from .montecarlo import (
    CriticalValueTable,
    McConfig,
    McReport,
    emit_table,
    empirical_critical_values,
    read_table_csv,
    run_power_experiment,
    run_size_experiment,
    simulate_scores,
)
from .simulate import (
    AR1_MODEL,
    MA1_MODEL,
    Construction,
    InnovationDist,
    InnovationSpec,
    alternative_corr,
    gen_innovations,
    simulate_pair,
)
from .spectral import (
    Kernel,
    WindowWeights,
    bandwidth,
    dft,
    fourier_frequencies,
    kernel_eval,
    periodograms,
    spectral_constants,
)
from .stats import (
    SpectralIndependenceTest,
    StatisticKind,
    TestResult,
    t_statistic,
    test_far,
    test_known,
    test_parametric,
)
from .whittle import (
    WhittleFAR,
    WhittleFARIMA,
    WhittleFit,
    choose_far_order,
    fit_whittle_far,
    fit_whittle_farima,
)

__all__ = [
    "AR1_MODEL",
    "ConfigurationError",
    "Construction",
    "CriticalValueTable",
    "DegenerateInputError",
    "FarParams",
    "FarimaParams",
    "FarimaVariant",
    "InnovationDist",
    "InnovationSpec",
    "InvalidInputError",
    "InvalidSpecError",
    "Kernel",
    "MA1_MODEL",
    "McConfig",
    "McReport",
    "SingularModelError",
    "SpectralIndependenceTest",
    "StatisticKind",
    "TestResult",
    "WhittleFAR",
    "WhittleFARIMA",
    "WhittleFit",
    "WindowWeights",
    "alternative_corr",
    "bandwidth",
    "choose_far_order",
    "dft",
    "emit_table",
    "empirical_critical_values",
    "far_spectral_density",
    "farima_spectral_density",
    "fit_whittle_far",
    "fit_whittle_farima",
    "fourier_frequencies",
    "frac_diff_coeffs",
    "gen_innovations",
    "is_stationary",
    "kernel_eval",
    "periodograms",
    "read_table_csv",
    "run_power_experiment",
    "run_size_experiment",
    "simulate_pair",
    "simulate_scores",
    "spectral_constants",
    "t_statistic",
    "test_far",
    "test_known",
    "test_parametric",
]

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # pragma: no cover - running from a source tree
    __version__ = "0.0.0"
