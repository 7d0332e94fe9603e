"""Association cells in multi-tier random wireless networks.

Samples marked Poisson point processes of access points on a torus,
rasterizes the association cells of stationary strategies (nearest,
max-power, max-SIR), and checks the Monte Carlo results against the
closed-form / quadrature mean-area and association-probability formulas.
"""

from .association import AssociationStrategy, scores, serving_ap
from .fading import FadingModel, GainFieldMode, fractional_moment, sample_gain
from .pointprocess import (
    EmptyPatternError,
    PointPattern,
    TierConfig,
    Window,
    assign_tiers,
    draw_gain_marks,
    sample_ppp,
)
from .tessellation import (
    AssociationMap,
    CellRecord,
    cell_areas,
    compute_association_map,
    write_raster,
    zero_cell,
)
from .analytics import (
    AnalyticPrediction,
    DivergenceError,
    QuadratureError,
    association_probability,
    campbell_functional,
    mean_area_closed_form,
    mean_area_integral,
    predict,
    transformed_densities,
)
from .stats import (
    AreaStatistics,
    area_bias_check,
    distribution_bias_check,
    run_experiment,
)

__all__ = [
    "AssociationStrategy",
    "scores",
    "serving_ap",
    "FadingModel",
    "GainFieldMode",
    "fractional_moment",
    "sample_gain",
    "EmptyPatternError",
    "PointPattern",
    "TierConfig",
    "Window",
    "assign_tiers",
    "draw_gain_marks",
    "sample_ppp",
    "AssociationMap",
    "CellRecord",
    "cell_areas",
    "compute_association_map",
    "write_raster",
    "zero_cell",
    "AnalyticPrediction",
    "DivergenceError",
    "QuadratureError",
    "association_probability",
    "campbell_functional",
    "mean_area_closed_form",
    "mean_area_integral",
    "predict",
    "transformed_densities",
    "AreaStatistics",
    "area_bias_check",
    "distribution_bias_check",
    "run_experiment",
]

__version__ = "0.1.0"
