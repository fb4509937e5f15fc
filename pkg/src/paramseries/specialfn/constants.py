"""pi, Euler's gamma and the constant M = int_0^1 (psi(1+x) + gamma)/x dx."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .. import accel
from ..errors import DomainError, NotConverged
from ..exactmath import Real, bits_for, to_real, working
from ..oracles import lerch_ref, zeta_ref
from ..transform import EvaluationReport, MuValidity, StoppingRule, transform_eval_paramfree
from . import sources
from .functions import digamma_param, loggamma_param, scaled


@dataclass(frozen=True)
class ConstantResult:
    name: str
    value: Real
    representation_id: str
    report: EvaluationReport


class PrefixVariant(str, enum.Enum):
    """Candidate closed forms for the prefix of the accelerated gamma series."""

    SHIFTED = "shifted"  # (mu + 1 - ln(mu+1))/mu
    MU_DEPENDENT = "mu-dependent"  # (mu - ln(mu+1))/mu
    CONSTANT = "constant"  # 1 - ln 2


def amore_pi(mu=1, stop: StoppingRule | None = None) -> EvaluationReport:
    """pi = sum_n mu**n/(mu+1)**(n+1) sum_k C(n,k) mu**-k (3**k - 1)/4**k zeta(k+1)."""
    return transform_eval_paramfree(sources.amore_terms(), 1, mu, stop or StoppingRule())


def pi_via_digamma(mu=1, stop: StoppingRule | None = None) -> EvaluationReport:
    """pi = psi(3/4) - psi(1/4), both sides from the digamma series."""
    upper = digamma_param(Fraction(-1, 4), mu, stop)
    lower = digamma_param(Fraction(-3, 4), mu, stop)
    prec = min(upper.value.precision, lower.value.precision)
    with working(prec):
        return EvaluationReport(
            value=upper.value - lower.value,
            terms_used=max(upper.terms_used, lower.terms_used),
            last_increment=lower.last_increment,
            estimated_tail=upper.estimated_tail + lower.estimated_tail,
            validity=upper.validity,
            converged=upper.converged and lower.converged,
        )


def euler_gamma_param(mu=1, stop: StoppingRule | None = None) -> EvaluationReport:
    """gamma as ln Gamma(2) + gamma, i.e. the log-gamma series at x = 1."""
    return loggamma_param(1, mu, stop)


def accelerated_gamma_prefix(mu, variant: PrefixVariant, prec: int = 256) -> Real:
    """Closed-form part of the accelerated gamma series.

    The prefix must equal sum_n w_n sum_{k>=1} C(n,k) (-1)**(k-1) mu**-k/(k+1).
    That is the transform of sum_{k>=1} (-1)**(k-1) t**k/(k+1) at t = 1,
    so it is 1 - ln 2 for every admissible mu (CONSTANT).  The other two
    forms agree with it only at particular mu: MU_DEPENDENT at mu = 1,
    SHIFTED nowhere.
    """
    variant = PrefixVariant(variant)
    with working(prec):
        m = to_real(mu, prec)
        if m == 0:
            raise DomainError("the prefix needs mu != 0")
        if variant is PrefixVariant.SHIFTED:
            return (m + 1 - gmpy2.log(m + 1)) / m
        if variant is PrefixVariant.MU_DEPENDENT:
            return (m - gmpy2.log(m + 1)) / m
        return 1 - gmpy2.const_log2()


def euler_gamma_accel(mu=1, variant=PrefixVariant.CONSTANT,
                      stop: StoppingRule | None = None) -> EvaluationReport:
    """gamma = prefix + sum_n w_n sum_k C(n,k) (-1)**(k-1) mu**-k (zeta(k+1)-1)/(k+1)."""
    if to_real(mu, 64) == 0:
        raise DomainError("the accelerated gamma series needs mu != 0")
    report = transform_eval_paramfree(sources.gamma_shifted_terms(), 1, mu, stop or StoppingRule())
    return scaled(report, offset=accelerated_gamma_prefix(mu, variant, report.value.precision))


def alzer_koumandos_gamma(mu=1, stop: StoppingRule | None = None) -> EvaluationReport:
    """gamma = sum_n w_n sum_k C(n,k) mu**-k (-1)**k S(k), S(k) = sum 1/(2**j + k)."""
    return transform_eval_paramfree(sources.alzer_koumandos_terms(), 1, mu, stop or StoppingRule())


def m_constant_param(mu=1, stop: StoppingRule | None = None) -> EvaluationReport:
    return transform_eval_paramfree(sources.m_terms(), 1, mu, stop or StoppingRule())


def binomial_identity_check(n: int) -> Fraction:
    """Exact sum_{k=1}^n C(n,k) (-1)**(k-1)/(k+1); equals n/(n+1)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return sum((Fraction((-1) ** (k - 1) * math.comb(n, k), k + 1) for k in range(1, n + 1)),
               Fraction(0))


def zeta_bounds_check(n: int) -> bool:
    """Whether 2**-(n+1) < zeta(n+1) - 1 < 2**-(n+1) (1 + 2/n) holds."""
    if n < 1:
        raise ValueError("n must be at least 1")
    prec = 2 * n + 96
    z = zeta_ref(n + 1, Fraction(1, 2**prec))
    with working(prec + 32):
        excess = z.value - 1
        low = gmpy2.mul_2exp(mpfr(1), -(n + 1))
        high = low * (1 + mpfr(2) / n)
        err = z.claimed_error
        return bool(low + err < excess < high - err)


# The five companion series for M.  Each has its own way of closing the tail.

def _report(value, terms, tail, prec):
    return EvaluationReport(mpfr(value, prec), terms, mpfr(0), mpfr(tail, 64),
                            MuValidity.SAFE, True)


def _m_alternating(prec, tol):
    # sum (-1)**(n-1) zeta(n+1)/n, a totally monotone alternating series
    first = sources.ZETA(2, prec)
    n = accel.alternating_terms_needed(bits_for(tol) + 4)
    with working(prec):
        value = accel.alternating_sum(lambda j: sources.ZETA(j + 2, prec) / (j + 1), n, prec)
        tail = 2 * first / (3 + gmpy2.sqrt(mpfr(8))) ** n
    return _report(value, n, tail, prec)


def _log_tail(head: int, prec, tol):
    # sum_{n>head} ln(1+1/n)/n = sum_j (-1)**(j-1)/j * zeta(j+1, head+1)
    with working(prec):
        total = mpfr(0)
        t = to_real(tol, prec) / 4
        j = 1
        while True:
            hz = lerch_ref(1, head + 1, j + 1, Fraction(1, 2 ** (prec - 8))).value
            term = hz / j
            total = total + term if j % 2 else total - term
            if term < t:
                # alternating with decreasing terms: the error is below the last term
                return total, j, term
            j += 1


def _m_log(prec, tol, head=64):
    with working(prec):
        total = mpfr(0)
        for n in range(head, 0, -1):
            total += gmpy2.log1p(mpfr(1) / n) / n
        tail, used, bound = _log_tail(head, prec, tol)
        return _report(total + tail, head + used, bound, prec)


def _m_log_ratio(prec, tol, head=64):
    # summation by parts moves the tail onto the ln(1+1/n)/n tail
    with working(prec):
        total = mpfr(0)
        for n in range(head, 0, -1):
            total += gmpy2.log(mpfr(n + 1)) / (n * (n + 1))
        tail, used, bound = _log_tail(head, prec, tol)
        total += gmpy2.log(mpfr(head + 1)) / (head + 1) + tail
        return _report(total, head + used, bound, prec)


def _m_harmonic(prec, tol):
    with working(prec):
        t = to_real(tol, prec)
        total = mpfr(0)
        h = mpfr(0)
        n = 0
        while True:
            n += 1
            h += mpfr(1) / n
            total += h * sources.zeta_minus_one(n + 1, prec)
            tail = mpfr(3) / 2 * (n + 2) * gmpy2.mul_2exp(mpfr(1), -n)
            if tail <= t:
                return _report(total, n, tail, prec)


def _m_zeta_partial(prec, tol):
    # term_n = (1/n)(1 - sum_{j=2}^n (zeta(j)-1)) < 3 * 2**-n / n
    with working(prec):
        t = to_real(tol, prec)
        total = mpfr(0)
        running = mpfr(0)
        n = 0
        while True:
            n += 1
            if n >= 2:
                running += sources.zeta_minus_one(n, prec)
            total += (1 - running) / n
            tail = 3 * gmpy2.mul_2exp(mpfr(1), -n) / (n + 1)
            if tail <= t:
                return _report(total, n, tail, prec)


M_ALTERNATIVES = {
    "m-alt-zeta-over-n": _m_alternating,
    "m-alt-log": _m_log,
    "m-alt-log-ratio": _m_log_ratio,
    "m-alt-harmonic-zeta": _m_harmonic,
    "m-alt-zeta-partial": _m_zeta_partial,
}


def m_constant_alternatives(stop: StoppingRule | None = None) -> list[ConstantResult]:
    """Evaluate the five classical series for M, each with its own tail policy."""
    stop = stop or StoppingRule()
    prec = stop.target_bits + 32
    tol = to_real(stop.tolerance, prec)
    results = []
    for rep_id, fn in M_ALTERNATIVES.items():
        report = fn(prec, tol)
        if report.estimated_tail > tol:
            raise NotConverged(f"{rep_id} did not reach the tolerance", report)
        results.append(ConstantResult("M", report.value, rep_id, report))
    return results
