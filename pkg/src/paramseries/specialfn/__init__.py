"""Concrete representations built on the transform engine."""

from .constants import (
    ConstantResult,
    PrefixVariant,
    alzer_koumandos_gamma,
    amore_pi,
    binomial_identity_check,
    accelerated_gamma_prefix,
    euler_gamma_accel,
    euler_gamma_param,
    m_constant_alternatives,
    m_constant_param,
    pi_via_digamma,
    zeta_bounds_check,
)
from .functions import (
    digamma_param,
    elliptic_e_param,
    elliptic_k_param,
    exp_laguerre_identity,
    laguerre_eval,
    lerch_param,
    loggamma_param,
    polylog_param,
    zeta_hasse,
)
from .sources import CATALOG, ZETA, s_series

__all__ = [
    "CATALOG",
    "ConstantResult",
    "PrefixVariant",
    "ZETA",
    "alzer_koumandos_gamma",
    "amore_pi",
    "binomial_identity_check",
    "digamma_param",
    "elliptic_e_param",
    "elliptic_k_param",
    "accelerated_gamma_prefix",
    "euler_gamma_accel",
    "euler_gamma_param",
    "exp_laguerre_identity",
    "laguerre_eval",
    "lerch_param",
    "loggamma_param",
    "m_constant_alternatives",
    "m_constant_param",
    "pi_via_digamma",
    "polylog_param",
    "s_series",
    "zeta_bounds_check",
    "zeta_hasse",
]
