"""Rearrangements, Hardy-type operators and Lorentz norms for grid functions on the quadrant."""

__version__ = "0.1.0"

from .grid import (
    Exponents,
    GridError,
    GridFunction1D,
    GridFunction2D,
    Staircase,
    cumulative_integral,
    load_grid,
    save_grid,
)
from .weights import (
    IndicatorWeight,
    PowerWeight,
    ProductWeight,
    StepWeight,
    StepWeight2D,
    constant,
    parse_weight1d,
    parse_weight2d,
)
from .rearrange import rearrange_1d, rearrange_global, rearrange_x, rearrange_xy, rearrange_y, rearrange_yx
from .hardy import fstarstar, s2, s21, superlevel_measure
from .norms import lambda2_norm, lambda_norm, mixed_norm, norm2_starstar, star_norm, weak_lp_norm
from .bclasses import b1inf_constant, b2_product_formula, b2p_membership, b21_staircase_sup, bp_constant
from .embeddings import (
    CoveringFamily,
    covering_functionals_jl1,
    covering_functionals_jl2,
    embed_const_forward,
    embed_const_reverse,
    embedding_inequality_check,
)
