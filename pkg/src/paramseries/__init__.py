"""Taylor series rewritten with a free parameter, evaluated in arbitrary precision.

A series f(t) = sum a_k t**k becomes

    f(mu x) = sum_n mu**n/(mu+1)**(n+1) sum_{k<=n} C(n,k) x**k a_k,

which converges for the ranges of mu reported by ``mu_validity``.  The
package evaluates such series with guarded precision, checks them against
independent reference algorithms, and measures how mu changes the cost.
"""

from .errors import DomainError, InvalidMu, NoConvergentMu, NotConverged, ParamSeriesError
from .exactmath import PrecisionPolicy, binomial, binomial_row
from .studies import StudyConfig, SweepRecord, error_curve, mu_sweep, optimal_mu
from .transform import (
    CoefficientSource,
    EvaluationReport,
    MuValidity,
    StoppingRule,
    inner_sum,
    mu_validity,
    tail_estimate,
    transform_eval,
    transform_eval_paramfree,
    weight,
)

__version__ = "0.1.0"

__all__ = [
    "CoefficientSource",
    "DomainError",
    "EvaluationReport",
    "InvalidMu",
    "MuValidity",
    "NoConvergentMu",
    "NotConverged",
    "ParamSeriesError",
    "PrecisionPolicy",
    "StoppingRule",
    "StudyConfig",
    "SweepRecord",
    "binomial",
    "binomial_row",
    "error_curve",
    "inner_sum",
    "mu_sweep",
    "mu_validity",
    "optimal_mu",
    "tail_estimate",
    "transform_eval",
    "transform_eval_paramfree",
    "weight",
]
