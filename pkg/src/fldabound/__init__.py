"""Fisher's linear discriminant analysis with asymptotic generalization bounds.

Submodules
----------
kernels  : symmetric eigen, range and SPD solve primitives
problem  : homoscedastic Gaussian populations, sampling, scatter estimates
flda     : fitting, discrimination power, attenuation factors, binary error
bounds   : power and error bounds, Gaussian CDF and quantile
rmt      : Marchenko-Pastur law and random-matrix checks
harness  : simulated and real-data experiments, CSV/JSON output
cli      : command-line front end
"""

from .bounds import (
    covariance_only_approx,
    error_upper_bound,
    normal_cdf,
    normal_quantile,
    power_bound_curve,
    power_lower_bound,
    subspace_overlap_bound,
    varrho,
)
from .flda import (
    DeltaFactors,
    FldaModel,
    SimDiag,
    bayes_error,
    delta_factors,
    discrimination_power,
    fit_flda,
    generalization_error,
    simultaneous_diagonalize,
)
from .harness import ExperimentConfig, run_error_simulation, run_power_simulation, summarize
from .problem import (
    HomoscedasticGaussianProblem,
    LabeledDataset,
    ScatterEstimates,
    between_scatter,
    estimate_scatters,
    random_problem,
    sample_dataset,
)
from .rmt import MpLaw, SpectralSample

__version__ = "0.1.0"

__all__ = [
    "DeltaFactors",
    "ExperimentConfig",
    "FldaModel",
    "HomoscedasticGaussianProblem",
    "LabeledDataset",
    "MpLaw",
    "ScatterEstimates",
    "SimDiag",
    "SpectralSample",
    "bayes_error",
    "between_scatter",
    "covariance_only_approx",
    "delta_factors",
    "discrimination_power",
    "error_upper_bound",
    "estimate_scatters",
    "fit_flda",
    "generalization_error",
    "normal_cdf",
    "normal_quantile",
    "power_bound_curve",
    "power_lower_bound",
    "random_problem",
    "run_error_simulation",
    "run_power_simulation",
    "sample_dataset",
    "simultaneous_diagonalize",
    "subspace_overlap_bound",
    "summarize",
    "varrho",
]
