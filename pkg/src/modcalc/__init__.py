"""Exact symbolic kernel for modular vector fields of Poisson structures on foliated charts."""

from modcalc.ratfun import Chart, ScalarFunction, parse_scalar

__version__ = "0.1.0"

__all__ = ["Chart", "ScalarFunction", "parse_scalar", "__version__"]
