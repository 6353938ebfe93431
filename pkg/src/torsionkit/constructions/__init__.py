"""Explicit polynomial families and rational-point witnesses."""

from .addhypers import add_hypers, build_check_f, step1_chain, step1_pair, step2_alt_m2, step2_deform
from .assembly import (
    assemble_ci,
    assemble_ci_low_index,
    assemble_product_hypersurface,
    ci_dimension_bound,
    eliminate_case_c,
)
from .base import (
    FAMILIES,
    ConstructionRecipe,
    GeneratedFamily,
    base_hypersurface,
    build_base_n3,
    build_f0,
    build_g,
    c_coefficient,
    double_cone,
    double_cone_budget,
    double_cone_schedule,
    f0_with_double_cones,
    recognize_double_cone_form,
)
from .fixed import fixed_example, hpt_birational_chain, hpt_chart_chain
from .recipes import build
from .witness import WitnessCheck, WitnessResult, check_star_witness
