"""Special functions: gamma family, confluent hypergeometric, Whittaker, Bessel."""

from .gamma import EULER_GAMMA, digamma, gamma, log_gamma, rgamma, trigamma
from .hypergeometric import DEFAULT_POLICY, EvalPolicy, kummer_m, tricomi_u
from .whittaker import (
    bessel,
    is_terminating,
    laguerre,
    sqrt_minus,
    whittaker_m,
    whittaker_m_logscaled,
    whittaker_w,
    whittaker_w_logscaled,
)

__all__ = [
    "EULER_GAMMA", "DEFAULT_POLICY", "EvalPolicy",
    "log_gamma", "gamma", "rgamma", "digamma", "trigamma",
    "kummer_m", "tricomi_u", "whittaker_m", "whittaker_w",
    "whittaker_m_logscaled", "whittaker_w_logscaled", "is_terminating",
    "laguerre", "bessel", "sqrt_minus",
]
