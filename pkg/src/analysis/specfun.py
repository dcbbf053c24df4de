"""
Special functions used by the closed-form BER, outage and energy-outage expressions.

Thin, domain-checked wrappers over scipy.special plus a quadrature helper that the
test-suite uses as an oracle. Every function accepts scalars or numpy arrays and
returns a float for scalar input.
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from config import (
    HYPERU_ASYMPTOTIC_THRESHOLD,
    QUAD_ABS_TOL,
    QUAD_MAX_SUBDIVISIONS,
    QUAD_REL_TOL,
)


class SpecialFunctionError(ValueError):
    """Raised on arguments outside the supported domain of a special function."""

    pass


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances handed to scipy.integrate.quad."""

    abs_tol: float = QUAD_ABS_TOL
    rel_tol: float = QUAD_REL_TOL
    max_subdivisions: int = QUAD_MAX_SUBDIVISIONS

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise SpecialFunctionError(f"abs_tol must be > 0, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise SpecialFunctionError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.max_subdivisions < 1:
            raise SpecialFunctionError(
                f"max_subdivisions must be >= 1, got {self.max_subdivisions}"
            )


DEFAULT_QUADRATURE = QuadratureSpec()


def quadrature(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    points: list[float] | None = None,
) -> float:
    """
    Integrate a scalar function over [lo, hi] (hi may be np.inf).

    Raises:
        SpecialFunctionError: If the integral is not finite
    """
    kwargs = {"epsabs": spec.abs_tol, "epsrel": spec.rel_tol, "limit": spec.max_subdivisions}
    if points is not None and np.isfinite(hi):
        kwargs["points"] = points
    value, _ = integrate.quad(fn, lo, hi, **kwargs)
    if not np.isfinite(value):
        raise SpecialFunctionError(f"quadrature over [{lo}, {hi}] did not converge")
    return float(value)


def _is_scalar(*args) -> bool:
    return all(np.ndim(a) == 0 for a in args)


def _out(values, scalar: bool):
    return float(values) if scalar else np.asarray(values, dtype=float)


def q_function(x):
    """Gaussian tail probability Q(x) = P(Z > x) for Z ~ N(0, 1)."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise SpecialFunctionError("q_function requires finite arguments")
    return _out(0.5 * special.erfc(arr / np.sqrt(2.0)), _is_scalar(x))


def gamma_fn(x):
    """Gamma function for positive real arguments."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise SpecialFunctionError("gamma_fn requires x > 0")
    return _out(special.gamma(arr), _is_scalar(x))


def regularized_lower_gamma(a, x):
    """P(a, x) = gamma(a, x) / Gamma(a), the Gamma(a, 1) CDF at x."""
    a_arr = np.asarray(a, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(a_arr > 0)) or np.any(~(x_arr >= 0)):
        raise SpecialFunctionError("regularized_lower_gamma requires a > 0 and x >= 0")
    return _out(special.gammainc(a_arr, x_arr), _is_scalar(a, x))


def lower_incomplete_gamma(a, x):
    """Lower incomplete gamma function gamma(a, x) = int_0^x t^(a-1) e^(-t) dt."""
    a_arr = np.asarray(a, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(a_arr > 0)) or np.any(~(x_arr >= 0)):
        raise SpecialFunctionError("lower_incomplete_gamma requires a > 0 and x >= 0")
    return _out(special.gammainc(a_arr, x_arr) * special.gamma(a_arr), _is_scalar(a, x))


def upper_incomplete_gamma(a, x):
    """
    Upper incomplete gamma function Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt.

    a = 0 is the exponential integral E1(x) and requires x > 0.
    """
    a_arr = np.asarray(a, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    a_arr, x_arr = np.broadcast_arrays(a_arr, x_arr)
    if np.any(a_arr < 0) or np.any(~(x_arr >= 0)) or np.any(np.isnan(a_arr)):
        raise SpecialFunctionError("upper_incomplete_gamma requires a >= 0 and x >= 0")
    zero_order = a_arr == 0
    if np.any(zero_order & (x_arr == 0)):
        raise SpecialFunctionError("upper_incomplete_gamma(0, 0) diverges")

    result = np.empty(a_arr.shape, dtype=float)
    result[zero_order] = special.exp1(x_arr[zero_order])
    pos = ~zero_order
    result[pos] = special.gammaincc(a_arr[pos], x_arr[pos]) * special.gamma(a_arr[pos])
    return _out(result, _is_scalar(a, x))


def bessel_k(nu, x):
    """Modified Bessel function of the second kind K_nu(x), x > 0."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise SpecialFunctionError("bessel_k requires x > 0")
    return _out(special.kv(np.asarray(nu, dtype=float), x_arr), _is_scalar(nu, x))


def log_bessel_k(nu, x):
    """log K_nu(x), stable for large x where K_nu underflows."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise SpecialFunctionError("log_bessel_k requires x > 0")
    return _out(np.log(special.kve(np.asarray(nu, dtype=float), x_arr)) - x_arr, _is_scalar(nu, x))


def _hyper_u_asymptotic(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    # U(a,b,x) ~ x^-a * sum_k (a)_k (a-b+1)_k / k! * (-1/x)^k, truncated at the smallest term
    term = np.ones_like(x)
    total = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(60):
        ratio = (a + k) * (a - b + 1 + k) / ((k + 1) * -x)
        nxt = term * ratio
        # stop a lane once terms stop shrinking or drop below machine precision
        active &= (np.abs(nxt) < np.abs(term)) & (np.abs(term) > 1e-17 * np.abs(total))
        if not np.any(active):
            break
        total = np.where(active, total + nxt, total)
        term = np.where(active, nxt, term)
    return total * np.power(x, -a)


def hyper_u(a, b, x):
    """
    Tricomi confluent hypergeometric function U(a, b, x) for a > 0, x > 0.

    scipy.special.hyperu is used up to HYPERU_ASYMPTOTIC_THRESHOLD, the large-x
    asymptotic series beyond it.
    """
    a_arr, b_arr, x_arr = np.broadcast_arrays(
        np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(x, dtype=float)
    )
    if np.any(~(a_arr > 0)) or np.any(~(x_arr > 0)) or np.any(~np.isfinite(b_arr)):
        raise SpecialFunctionError(
            "hyper_u is supported for a > 0, x > 0 and finite real b only"
        )

    result = np.empty(x_arr.shape, dtype=float)
    large = x_arr >= HYPERU_ASYMPTOTIC_THRESHOLD
    result[large] = _hyper_u_asymptotic(a_arr[large], b_arr[large], x_arr[large])
    small = ~large
    result[small] = special.hyperu(a_arr[small], b_arr[small], x_arr[small])

    if not np.all(np.isfinite(result)):
        raise SpecialFunctionError(
            "hyper_u did not return a finite value in the region a > 0, x > 0"
        )
    return _out(result, _is_scalar(a, b, x))
