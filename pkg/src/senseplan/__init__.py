"""Sensor placement planning with Gaussian-process beliefs.

The package models a static scalar field as a Gaussian process, scores
candidate sensing locations by the expected information gain of one more
noisy reading, and runs greedy or random measurement episodes so the two
policies can be compared on equal footing.
"""

from .errors import (
    ConfigError,
    DataError,
    FieldDomainError,
    InvalidInputError,
    NumericalDegeneracyError,
    PlacementError,
    PlanningError,
    SensorPlanError,
)
from .gp import (
    GaussianBelief,
    KernelSpec,
    MeanSpec,
    MeasurementLog,
    jittered_cholesky,
    kernel_matrix,
    posterior,
    predictive_measurement,
    sample_prior_field,
)
from .infogain import (
    EDGResult,
    QuadratureSpec,
    UnnormalizedFormResult,
    edg_exact,
    edg_quadrature,
    edg_unnormalized_form,
    kl_gaussian,
)
from .environment import (
    ANALYTIC_CATALOG,
    AnalyticField,
    GridData,
    GridField,
    GridMask,
    GroundTruthField,
    PolygonMask,
    RoIMask,
    SampledField,
    field_value,
    load_grid_csv,
    measure,
    place_scenario,
    sample_field,
    save_grid_csv,
)
from .metrics import (
    METRIC_NAMES,
    MetricSeries,
    aggregate_series,
    estimating_error,
    estimating_variance,
    intersection_indices,
    rmse,
)
from .planner import (
    PLANNER_KINDS,
    EpisodeStep,
    EpisodeTrace,
    ScenarioConfig,
    greedy_select,
    random_select,
    run_episode,
)

__version__ = "0.1.0"

__all__ = [
    "ANALYTIC_CATALOG",
    "AnalyticField",
    "ConfigError",
    "DataError",
    "EDGResult",
    "EpisodeStep",
    "EpisodeTrace",
    "FieldDomainError",
    "GaussianBelief",
    "GridData",
    "GridField",
    "GridMask",
    "GroundTruthField",
    "InvalidInputError",
    "KernelSpec",
    "METRIC_NAMES",
    "MeanSpec",
    "MeasurementLog",
    "MetricSeries",
    "NumericalDegeneracyError",
    "PLANNER_KINDS",
    "PlacementError",
    "PlanningError",
    "PolygonMask",
    "QuadratureSpec",
    "RoIMask",
    "SampledField",
    "ScenarioConfig",
    "SensorPlanError",
    "UnnormalizedFormResult",
    "aggregate_series",
    "edg_exact",
    "edg_quadrature",
    "edg_unnormalized_form",
    "estimating_error",
    "estimating_variance",
    "field_value",
    "greedy_select",
    "intersection_indices",
    "jittered_cholesky",
    "kernel_matrix",
    "kl_gaussian",
    "load_grid_csv",
    "measure",
    "place_scenario",
    "posterior",
    "predictive_measurement",
    "random_select",
    "rmse",
    "run_episode",
    "sample_field",
    "sample_prior_field",
    "save_grid_csv",
    "__version__",
]
