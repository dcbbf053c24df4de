"""
Special functions and closed-form performance analysis.

Closed forms live in analysis.closed_form and are imported from there explicitly;
they depend on radio.channel, which itself builds on analysis.specfun.
"""

from .specfun import (
    QuadratureSpec,
    SpecialFunctionError,
    bessel_k,
    gamma_fn,
    hyper_u,
    log_bessel_k,
    lower_incomplete_gamma,
    q_function,
    quadrature,
    regularized_lower_gamma,
    upper_incomplete_gamma,
)

__all__ = [
    "QuadratureSpec",
    "SpecialFunctionError",
    "bessel_k",
    "gamma_fn",
    "hyper_u",
    "log_bessel_k",
    "lower_incomplete_gamma",
    "q_function",
    "quadrature",
    "regularized_lower_gamma",
    "upper_incomplete_gamma",
]
