"""Meta-intransitive systems of dice-like random variables and their fractals."""

from .fractal import (
    DimensionReport,
    PointCloud,
    affine_rank,
    dimension_report,
    dimension_sup,
    embed_points,
    export_csv,
    export_svg,
    parse_csv,
    similarity_dimension,
)
from .generation import (
    AdmissibilityError,
    BasicTuple,
    BasicTupleError,
    Generation,
    InfiniteIndex,
    LambdaConfig,
    WeightFunction,
    build_generation,
    first_divergence,
    function_for_index,
    infinite_index_function,
    j_functional,
    lambda_config,
    minimal_lambda,
    validate_basic,
    verify_bijection,
    verify_meta_intransitivity,
    verify_proposition1,
    verify_proposition2,
    verify_theorem1,
    verify_theorem2,
)
from .preference import (
    CycleReport,
    cycle_report,
    monte_carlo_rho,
    precedes,
    rho_q,
    trybula_bound,
    trybula_triplet,
    win_probabilities,
)
from .presets import efron, get_preset, lo_shu, simplest
from .quantile import (
    FloatQuantile,
    StepQuantile,
    affine,
    compute_separation,
    evaluate,
    make_dice,
)

__version__ = "0.1.0"
