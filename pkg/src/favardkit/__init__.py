"""favardkit: certified Favard-length quadrature and quantitative rectifiability tools.

Exact projections of dyadic square sets, error-controlled Favard length,
Jones beta numbers, Lipschitz-graph coverage bounds, scale-schedule builders,
and pointwise geometric diagnostics, with a batch command line driver.
"""

from .errors import BudgetError, ConfigError, HypothesisFailure
from .geometry import (
    Direction,
    DyadicSquare,
    Interval,
    IntervalSet,
    Line,
    SquareSet,
    merge_intervals,
    min_strip_halfwidth,
    neighborhood,
)
from .cantor import (
    CantorGeneration,
    DiscreteMeasure,
    boundary_squares,
    cantor_generation,
    cantor_intervals,
    cantor_squares,
    natural_measure,
    spherical_content_upper,
)
from .projection import (
    FavardEstimate,
    FavardRow,
    FavardTable,
    MCNeedleEstimate,
    favard,
    favard_mc,
    favard_table,
    project,
    warmup,
)
from .beta import (
    BetaResult,
    DeficitReport,
    JonesSum,
    beta_number,
    jones_sum,
    path_cells,
    square_count_deficit,
    tent_graph_squares,
)
from .rectifiability import (
    LipschitzPath,
    RectEstimate,
    RectQuery,
    frame_from_angle,
    rect_lower_dp,
    rect_lower_sweep,
    rect_upper_beta,
    rect_upper_twoproj,
)
from .multiscale import (
    BoundReport,
    ScaleSchedule,
    build_schedule_main,
    build_schedule_twoproj,
    favar_bound,
    log_star,
    pigeonhole,
)
from .diagnostics import (
    NormalResult,
    SectorQuery,
    hl_maximal_density,
    is_normal,
    line_multiplicity,
    max_strip_density,
    sector_mass,
    strip_mass,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ConfigError",
    "HypothesisFailure",
    "Direction",
    "DyadicSquare",
    "Interval",
    "IntervalSet",
    "Line",
    "SquareSet",
    "merge_intervals",
    "min_strip_halfwidth",
    "neighborhood",
    "CantorGeneration",
    "DiscreteMeasure",
    "boundary_squares",
    "cantor_generation",
    "cantor_intervals",
    "cantor_squares",
    "natural_measure",
    "spherical_content_upper",
    "FavardEstimate",
    "FavardRow",
    "FavardTable",
    "MCNeedleEstimate",
    "favard",
    "favard_mc",
    "favard_table",
    "project",
    "warmup",
    "BetaResult",
    "DeficitReport",
    "JonesSum",
    "beta_number",
    "jones_sum",
    "path_cells",
    "square_count_deficit",
    "tent_graph_squares",
    "LipschitzPath",
    "RectEstimate",
    "RectQuery",
    "frame_from_angle",
    "rect_lower_dp",
    "rect_lower_sweep",
    "rect_upper_beta",
    "rect_upper_twoproj",
    "BoundReport",
    "ScaleSchedule",
    "build_schedule_main",
    "build_schedule_twoproj",
    "favar_bound",
    "log_star",
    "pigeonhole",
    "NormalResult",
    "SectorQuery",
    "hl_maximal_density",
    "is_normal",
    "line_multiplicity",
    "max_strip_density",
    "sector_mass",
    "strip_mass",
    "__version__",
]
