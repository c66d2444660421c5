from .interval import (
    IntervalReal,
    bits_for_digits,
    interval_refine,
    quad_to_interval,
    sqrt_interval,
    tolerance,
)
from .quad import QuadElem, factorize, quad, quad_arith, squarefree_decompose
from .rational import Rational, as_fraction, format_rational, is_integer, is_natural, parse_rational

__all__ = [
    "IntervalReal", "QuadElem", "Rational", "as_fraction", "bits_for_digits", "factorize",
    "format_rational", "interval_refine", "is_integer", "is_natural", "parse_rational", "quad",
    "quad_arith", "quad_to_interval", "sqrt_interval", "squarefree_decompose", "tolerance",
]
