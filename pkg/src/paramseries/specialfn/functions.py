"""Parameterized series for zeta, Lerch, polylog, digamma, log-gamma,
elliptic integrals and the Laguerre form of exp(-x)."""

from __future__ import annotations

import itertools
from dataclasses import replace
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from ..errors import DomainError
from ..exactmath import as_exact, to_real, working
from ..transform import (
    EvaluationReport,
    StoppingRule,
    _inner_argument,
    sum_outer,
    transform_eval,
    transform_eval_paramfree,
)
from . import sources


def _real_arg(v, name, prec=128):
    try:
        return to_real(v, prec)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {v!r}") from exc


def scaled(report: EvaluationReport, factor=None, offset=None) -> EvaluationReport:
    """Return ``report`` with its value mapped to factor*value + offset.

    The tail estimate and last increment scale with ``factor`` too.
    """
    prec = report.value.precision
    with working(prec):
        value = report.value
        tail = report.estimated_tail
        last = report.last_increment
        if factor is not None:
            f = to_real(factor, prec)
            value, tail, last = value * f, tail * abs(f), last * f
        if offset is not None:
            value = value + to_real(offset, prec)
        return replace(report, value=value, estimated_tail=tail, last_increment=last)


def _square(x):
    xq = as_exact(x)
    if xq is not None:
        return xq * xq
    return to_real(x, 512) ** 2


def _check_s(s):
    if _real_arg(s, "s") <= 1:
        raise DomainError(f"s must exceed 1, got {s}")


def zeta_hasse(s, mu=1, stop: StoppingRule | None = None) -> EvaluationReport:
    """zeta(s) from the alternating series sum (-1)**k/(k+1)**s.

    At mu = 1 this is Hasse's globally convergent formula; other mu use the
    same Lerch-type transform.  The result is divided by 1 - 2**(1-s).
    """
    _check_s(s)
    stop = stop or StoppingRule()
    eta = transform_eval_paramfree(sources.lerch_terms(1, s), -1, mu, stop)
    prec = eta.value.precision
    with working(prec):
        factor = 1 / (1 - 2 ** (1 - to_real(s, prec)))
    return scaled(eta, factor)


def lerch_param(x, a, s, stop: StoppingRule | None = None) -> EvaluationReport:
    """Phi(-x, a, s) through the transform with the parameter set to x."""
    _check_s(s)
    if _real_arg(a, "a") <= 0:
        raise DomainError(f"a must be positive, got {a}")
    if _real_arg(x, "x") <= Fraction(-1, 2):
        raise DomainError(f"the representation needs x > -1/2, got {x}")
    return transform_eval(sources.lerch_terms(a, s), -1, x, stop or StoppingRule())


def polylog_param(x, s, mu=1, stop: StoppingRule | None = None) -> EvaluationReport:
    """Li_s(x) = x * sum_n mu**n/(mu+1)**(n+1) sum_k C(n,k) (x/mu)**k/(k+1)**s.

    At x = 1 the outer terms decay only like n**-s, so that point is summed
    with Levin acceleration.
    """
    _check_s(s)
    xr = _real_arg(x, "x")
    if abs(xr) > 1:
        raise DomainError(f"polylog_param needs |x| <= 1, got {x}")
    if _real_arg(mu, "mu") <= Fraction(-1, 2):
        raise DomainError(f"polylog_param needs mu > -1/2, got {mu}")
    report = transform_eval_paramfree(sources.polylog_terms(s), x, mu, stop or StoppingRule(),
                                      accelerate=xr == 1)
    return scaled(report, x)


def digamma_param(x, mu=1, stop: StoppingRule | None = None) -> EvaluationReport:
    """psi(1+x) + gamma for -1 < x <= 1."""
    xr = _real_arg(x, "x")
    if not -1 < xr <= 1:
        raise DomainError(f"digamma_param needs -1 < x <= 1, got {x}")
    return transform_eval_paramfree(sources.digamma_taylor_pos(), x, mu, stop or StoppingRule())


def loggamma_param(x, mu=1, stop: StoppingRule | None = None) -> EvaluationReport:
    """ln Gamma(1+x) + gamma*x for -1 < x <= 1."""
    xr = _real_arg(x, "x")
    if not -1 < xr <= 1:
        raise DomainError(f"loggamma_param needs -1 < x <= 1, got {x}")
    report = transform_eval_paramfree(sources.loggamma_terms(), x, mu, stop or StoppingRule())
    return scaled(report, x)


def _elliptic(terms, x, mu, stop):
    if abs(_real_arg(x, "x")) >= 1:
        raise DomainError(f"elliptic integrals need |x| < 1, got {x}")
    stop = stop or StoppingRule()
    report = transform_eval_paramfree(terms, _square(x), mu, stop)
    prec = report.value.precision
    with working(prec):
        half_pi = gmpy2.const_pi() / 2
    return scaled(report, half_pi)


def elliptic_k_param(x, mu=1, stop: StoppingRule | None = None, unsquared: bool = False):
    """Complete elliptic integral K(x), modulus x."""
    return _elliptic(sources.elliptic_k_terms(unsquared), x, mu, stop)


def elliptic_e_param(x, mu=1, stop: StoppingRule | None = None, unsquared: bool = False):
    """Complete elliptic integral E(x), modulus x."""
    return _elliptic(sources.elliptic_e_terms(unsquared), x, mu, stop)


def laguerre_eval(n: int, x, prec: int = 256):
    """L_n(x) by (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}; exact for rational x."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    xq = as_exact(x)
    if xq is not None:
        prev, cur = Fraction(0), Fraction(1)
        for k in range(n):
            prev, cur = cur, ((2 * k + 1 - xq) * cur - k * prev) / (k + 1)
        return cur
    with working(prec):
        xr = to_real(x, prec)
        prev, cur = mpfr(0), mpfr(1)
        for k in range(n):
            prev, cur = cur, ((2 * k + 1 - xr) * cur - k * prev) / (k + 1)
        return cur


def laguerre_terms(x, mu):
    """Factory for the outer terms mu**n/(mu+1)**(n+1) L_n(x/mu)."""

    def make(wp):
        y = to_real(_inner_argument(x, mu, wp), wp)
        m = to_real(mu, wp)
        w = 1 / (m + 1)
        ratio = m / (m + 1)
        prev, cur = mpfr(0), mpfr(1)
        for k in itertools.count():
            yield w * cur
            prev, cur = cur, ((2 * k + 1 - y) * cur - k * prev) / (k + 1)
            w *= ratio

    return make


def exp_laguerre_identity(x, mu=1, stop: StoppingRule | None = None) -> EvaluationReport:
    """Sum mu**n/(mu+1)**(n+1) L_n(x/mu), which equals exp(-x)."""
    if to_real(mu, 64) == 0:
        raise DomainError("the Laguerre form needs mu != 0")
    bound = abs(float(to_real(x, 64)) / float(to_real(mu, 64)))
    return sum_outer(laguerre_terms(x, mu), mu, stop or StoppingRule(), bound)
