"""Certified verification of continued-fraction identities.

Exact continued-fraction arithmetic, contraction and lifting transforms,
certified series evaluation and a catalog of families with closed forms.
"""

from .cf import (Convergent, GeneralizedCF, RCFExpansion, RegularCF, certified_value, cf_enclosure,
                 convergents, eval_gcf, parse_cf_literal, rcf_expand, regularize)
from .errors import CFError, FamilyError, InvalidParams
from .families import catalog, closed_form, quotients, validate_params
from .numerics import IntervalReal, QuadElem
from .transform import corfl_lift, even_part, iterated_lift, odd_part
from .verify import VerificationReport, run_sweep, run_verify

__version__ = "0.1.0"

__all__ = [
    "CFError", "Convergent", "FamilyError", "GeneralizedCF", "IntervalReal", "InvalidParams", "QuadElem",
    "RCFExpansion", "RegularCF", "VerificationReport", "catalog", "certified_value", "cf_enclosure",
    "closed_form", "convergents", "corfl_lift", "eval_gcf", "even_part", "iterated_lift", "odd_part",
    "parse_cf_literal", "quotients", "rcf_expand", "regularize", "run_sweep", "run_verify",
    "validate_params",
]
