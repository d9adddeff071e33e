"""Chi-square distribution function for real (fractional) degrees of freedom."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special as sc

from .errors import InvalidParameter


@dataclass(frozen=True)
class ChiSquareParams:
    dof: float

    def __post_init__(self):
        if not (math.isfinite(self.dof) and self.dof > 0):
            raise InvalidParameter(f"degrees of freedom must be positive and finite, got {self.dof}")


def _check_gamma_args(a: float, x: float) -> None:
    if not (math.isfinite(a) and a > 0):
        raise InvalidParameter(f"shape must be positive and finite, got {a}")
    if not (math.isfinite(x) and x >= 0):
        raise InvalidParameter(f"argument must be nonnegative and finite, got {x}")


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(a, x)."""
    a, x = float(a), float(x)
    _check_gamma_args(a, x)
    return float(sc.gammainc(a, x))


def reg_upper_gamma(a: float, x: float) -> float:
    """Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x)."""
    a, x = float(a), float(x)
    _check_gamma_args(a, x)
    return float(sc.gammaincc(a, x))


def _dof(params) -> float:
    if isinstance(params, ChiSquareParams):
        return params.dof
    return ChiSquareParams(float(params)).dof


def chi2_cdf(x: float, params: ChiSquareParams | float) -> float:
    return reg_lower_gamma(0.5 * _dof(params), 0.5 * float(x))


def chi2_sf(x: float, params: ChiSquareParams | float) -> float:
    """Upper tail ``1 - chi2_cdf(x, params)``, accurate for small tail probabilities."""
    return reg_upper_gamma(0.5 * _dof(params), 0.5 * float(x))
