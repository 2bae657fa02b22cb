"""Stickelberger-type annihilators of the p-ramification torsion module of
real abelian fields, with p-adic L-values at s = 1 as the analytic side."""

from .fields import AbelianFieldSpec, build_field, characters_of, conductor_Ln, field_Ln
from .group_algebra import (
    EXACT,
    GroupRingElement,
    IntModPM,
    PrecisionError,
    SpiegelContext,
    YElem,
    char_eval,
    norm_valuation,
    restrict,
    spiegel,
    wt_equiv,
)
from .stickelberger import (
    AnnihilatorReport,
    annihilator_A,
    annihilator_measure,
    best_c,
    euler_factor,
    fixed_point_h,
    lambda_coeff,
    norm_relation_check,
    stickelberger_c,
    stickelberger_raw,
)
from .padic_cyclo import CycloRing, CycloRingElement, iwasawa_log, ring_make, ring_norm_valuation
from .lfunctions import (
    LpValue,
    analytic_valuation,
    cyclotomic_number,
    gauss_sum,
    lp_at_1,
    lp_values,
    reconstruct_annihilator,
    solomon_element,
)

__version__ = "0.1.0"
