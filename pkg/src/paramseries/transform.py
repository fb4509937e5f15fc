"""Parameterized binomial transform of a Taylor series.

For ``f(t) = sum a_k t**k`` the engine sums

    f(mu*x) = sum_n mu**n / (mu+1)**(n+1) * sum_k C(n,k) x**k a_k

(``transform_eval``) and the parameter-free companion whose inner sum is
``sum_k C(n,k) mu**(n-k) x**k a_k`` (``transform_eval_paramfree``).
Inner sums reuse the previous Pascal row and are accumulated in
fixed-point integers, so the only rounding is one ulp per stored term.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from gmpy2 import mpfr

from . import accel
from .errors import DomainError, InvalidMu, NotConverged
from .exactmath import (
    EXTRA_BITS,
    PrecisionPolicy,
    Real,
    as_exact,
    binomial,
    from_fixed,
    next_row,
    to_fixed,
    to_real,
    working,
)

log = logging.getLogger(__name__)

INITIAL_BUDGET = 128
LEVIN_STRIDE = 4
LEVIN_MIN_TERMS = 12


class MuValidity(str, enum.Enum):
    SAFE = "Safe"
    EXTENDED = "Extended"
    INVALID = "Invalid"


def mu_validity(mu) -> MuValidity:
    """Classify ``mu`` by whether the outer geometric ratio mu/(mu+1) is < 1.

    Safe is the band -1/3 <= mu <= 1 where the representation holds for
    every analytic f.  Outside it but with |mu/(mu+1)| < 1 the result is
    Extended: it holds for many sources and is judged empirically.
    """
    m = as_exact(mu)
    if m is None:
        m = to_real(mu, 128)
    if m == -1:
        raise ZeroDivisionError("mu = -1 makes the weights singular")
    if Fraction(-1, 3) <= m <= 1:
        return MuValidity.SAFE
    if m <= Fraction(-1, 2):
        return MuValidity.INVALID
    return MuValidity.EXTENDED


def outer_ratio(mu, prec: int = 64) -> Real:
    with working(prec):
        m = to_real(mu, prec)
        return abs(m / (m + 1))


class CoefficientSource:
    """Named, memoized provider of Taylor coefficients ``k -> a_k``.

    ``coeff_fn(k, prec)`` returns a Fraction for exact sources or a real
    good to ``prec`` bits otherwise.  Values are cached; a cached real is
    reused (rounded) whenever it was computed at least as precisely as
    requested.  The cache is guarded by a lock so one source may be shared
    between threads.
    """

    def __init__(self, name: str, coeff_fn: Callable, radius=None, exact: bool = False):
        self.name = name
        self.radius = radius
        self.exact = exact
        self._fn = coeff_fn
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"CoefficientSource({self.name!r}, radius={self.radius!r}, exact={self.exact})"

    def coeff(self, k: int, prec: int = 256):
        if k < 0:
            raise ValueError("coefficient index must be nonnegative")
        with self._lock:
            hit = self._cache.get(k)
        if hit is not None:
            if self.exact:
                return hit
            have_prec, value = hit
            if have_prec >= prec:
                return mpfr(value, prec)
        value = self._fn(k, prec)
        if self.exact:
            value = Fraction(value)
            with self._lock:
                self._cache[k] = value
            return value
        value = to_real(value, prec)
        with self._lock:
            old = self._cache.get(k)
            if old is None or old[0] < prec:
                self._cache[k] = (prec, value)
        return value

    def real(self, k: int, prec: int) -> Real:
        return to_real(self.coeff(k, prec), prec)


@dataclass(frozen=True)
class StoppingRule:
    tolerance: object = Fraction(1, 10**30)
    max_terms: int = 1000
    consecutive_small: int = 3
    target_bits: int = 256

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        if self.consecutive_small < 1:
            raise ValueError("consecutive_small must be at least 1")
        if to_real(self.tolerance, 64) <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class EvaluationReport:
    value: Real
    terms_used: int
    last_increment: Real
    estimated_tail: Real
    validity: MuValidity
    converged: bool
    increments: tuple = field(default=(), repr=False, compare=False)

    def __float__(self):
        return float(self.value)


def weight(n: int, mu, prec: int = 256):
    """mu**n / (mu+1)**(n+1) with 0**0 = 1; exact for rational mu."""
    m = as_exact(mu)
    if m is not None:
        if m == -1:
            raise ZeroDivisionError("weight is singular at mu = -1")
        return m**n / (m + 1) ** (n + 1)
    with working(prec):
        m = to_real(mu, prec)
        if m == -1:
            raise ZeroDivisionError("weight is singular at mu = -1")
        return (m**n if n else mpfr(1)) / (m + 1) ** (n + 1)


def inner_sum(n: int, x, coeffs: CoefficientSource, prec: int = 256):
    """sum_{k<=n} C(n,k) x**k a_k, exact when x and the source are rational."""
    xq = as_exact(x)
    if coeffs.exact and xq is not None:
        return sum(binomial(n, k) * xq**k * coeffs.coeff(k) for k in range(n + 1))
    wp = PrecisionPolicy(prec).working_bits(n, _magnitude(x))
    with working(wp):
        xr = to_real(x, wp)
        total = mpfr(0)
        for k in range(n + 1):
            total += binomial(n, k) * xr**k * coeffs.real(k, wp)
        return mpfr(total, prec)


def tail_estimate(last_term, mu, ratio=None, prec: int = 64) -> Real:
    """Geometric majorant |last_term| * r / (1 - r) for the outer tail.

    ``r`` is |mu/(mu+1)| unless a larger observed ``ratio`` is supplied.
    Returns +inf when r >= 1.
    """
    with working(prec):
        r = outer_ratio(mu, prec)
        if ratio is not None and ratio > r:
            r = mpfr(ratio, prec)
        if r >= 1:
            return mpfr("inf")
        return abs(mpfr(last_term, prec)) * r / (1 - r)


def _magnitude(x) -> float:
    try:
        return abs(float(to_real(x, 64)))
    except (TypeError, ValueError):
        return 1.0


def _check_mu(mu) -> MuValidity:
    validity = mu_validity(mu)
    if validity is MuValidity.INVALID:
        raise InvalidMu(f"mu = {mu} gives |mu/(mu+1)| >= 1; the outer series diverges")
    if validity is MuValidity.EXTENDED:
        log.debug("mu = %s is outside the proven band; proceeding", mu)
    return validity


def _stored_terms(coeffs, x, wp):
    """Fixed-point images of x**k a_k, generated lazily.

    The term generators below do not open a precision context of their
    own; they must be consumed inside ``working(wp)``.
    """
    xq = as_exact(x)
    if coeffs.exact and xq is not None:
        power = Fraction(1)
        for k in itertools.count():
            v = power * coeffs.coeff(k)
            num = v.numerator << wp
            yield (2 * num + v.denominator) // (2 * v.denominator)
            power *= xq
    xr = to_real(x, wp)
    power = mpfr(1, wp)
    for k in itertools.count():
        yield to_fixed(power * coeffs.real(k, wp), wp)
        power *= xr


def _outer_terms(coeffs, x, mu, wp):
    """Yield weight(n, mu) * inner_sum(n, x) for n = 0, 1, ..."""
    stored = _stored_terms(coeffs, x, wp)
    fixed = []
    row = [1]
    m = to_real(mu, wp)
    w = 1 / (m + 1)
    ratio = m / (m + 1)
    for n in itertools.count():
        if n:
            row = next_row(row)
        fixed.append(next(stored))
        acc = sum(map(int.__mul__, row, fixed))
        yield w * from_fixed(acc, wp, wp)
        w *= ratio


def _raw_taylor_terms(coeffs, x, wp):
    xr = to_real(x, wp)
    power = mpfr(1, wp)
    for k in itertools.count():
        yield power * coeffs.real(k, wp)
        power *= xr


def _observed_ratio(incs, span=4):
    if len(incs) <= span:
        return None
    a = abs(incs[-1 - span])
    b = max(abs(incs[-1]), abs(incs[-2]))
    if a == 0 or b == 0:
        return None
    return (b / a) ** (mpfr(1) / span)


def _sum_plain(term_iter, mu, stop, budget, tol, validity):
    total = mpfr(0)
    incs = []
    small = 0
    tail = mpfr("inf")
    for t in term_iter:
        total += t
        incs.append(t)
        envelope = max(abs(t), abs(incs[-2])) if len(incs) > 1 else abs(t)
        tail = tail_estimate(envelope, mu, _observed_ratio(incs), prec=64)
        small = small + 1 if tail <= tol else 0
        if small >= stop.consecutive_small or len(incs) >= budget:
            break
    converged = small >= stop.consecutive_small
    return EvaluationReport(total, len(incs), incs[-1], tail, validity, converged, tuple(incs))


def _sum_levin(term_iter, stop, budget, tol, validity, wp):
    incs = []
    total = mpfr(0)
    previous = None
    estimate = None
    small = 0
    tail = mpfr("inf")
    for t in term_iter:
        incs.append(t)
        total += t
        n = len(incs)
        if t == 0 and all(v == 0 for v in incs[-4:]) and n > 4:
            # series terminated; the plain sum is exact
            return EvaluationReport(total, n, t, mpfr(0), validity, True, tuple(incs))
        if n >= LEVIN_MIN_TERMS and n % LEVIN_STRIDE == 0:
            start = n // 2
            estimate = accel.levin_u(incs, start, n - start - 1, wp)
            if estimate is not None and previous is not None:
                tail = abs(estimate - previous)
                small = small + 1 if tail <= tol else 0
            previous = estimate
            if small >= stop.consecutive_small:
                break
        if n >= budget:
            break
    value = estimate if estimate is not None else total
    converged = small >= stop.consecutive_small
    return EvaluationReport(value, len(incs), incs[-1], tail, validity, converged, tuple(incs))


def sum_outer(make_terms, mu, stop: StoppingRule, argument_bound: float = 1.0,
              accelerate: bool = False) -> EvaluationReport:
    """Sum an outer series under ``stop``.

    ``make_terms(wp)`` returns an iterator of outer terms evaluated at
    ``wp`` bits.  The run starts with a small term budget and doubles it
    (re-evaluating at the wider guard) until the series converges or
    ``stop.max_terms`` is reached.
    """
    validity = _check_mu(mu)
    policy = PrecisionPolicy(stop.target_bits)
    budget = min(stop.max_terms, INITIAL_BUDGET)
    while True:
        wp = policy.working_bits(budget, argument_bound)
        if accelerate:
            wp += budget * max(1, math.ceil(math.log2(budget)))
        with working(wp):
            tol = to_real(stop.tolerance, wp)
            terms = make_terms(wp)
            if accelerate:
                report = _sum_levin(terms, stop, budget, tol, validity, wp)
            else:
                report = _sum_plain(terms, mu, stop, budget, tol, validity)
        if report.converged or budget >= stop.max_terms:
            break
        budget = min(2 * budget, stop.max_terms)
    if not report.converged:
        raise NotConverged(
            f"no convergence within {stop.max_terms} terms "
            f"(estimated tail {float(report.estimated_tail):.3e})",
            report,
        )
    return report


def _is_zero(v) -> bool:
    q = as_exact(v)
    return q == 0 if q is not None else to_real(v, 64) == 0


def _inner_argument(x, mu, wp):
    xq, mq = as_exact(x), as_exact(mu)
    if xq is not None and mq is not None:
        return xq / mq
    return to_real(x, wp) / to_real(mu, wp)


def term_factory(coeffs: CoefficientSource, x, mu, paramfree: bool = False):
    """Return ``(make_terms, argument_bound)`` for either series form.

    ``make_terms(wp)`` yields outer terms and must be consumed inside
    ``working(wp)``.  ``argument_bound`` is |inner argument|, which sets
    the cancellation guard.
    """
    if not paramfree:
        return (lambda wp: _outer_terms(coeffs, x, mu, wp)), _magnitude(x)
    if _is_zero(mu):
        return (lambda wp: _raw_taylor_terms(coeffs, x, wp)), _magnitude(x)
    return ((lambda wp: _outer_terms(coeffs, _inner_argument(x, mu, wp), mu, wp)),
            _magnitude(x) / _magnitude(mu))


def _degenerate(coeffs, stop, validity):
    a0 = coeffs.real(0, stop.target_bits + EXTRA_BITS)
    return EvaluationReport(a0, 1, a0, mpfr(0), validity, True, (a0,))


def transform_eval(coeffs: CoefficientSource, x, mu, stop: Optional[StoppingRule] = None,
                   accelerate: bool = False) -> EvaluationReport:
    """Approximate f(mu*x) by the parameterized series.

    ``accelerate`` sums the outer series through a Levin u-transform; it
    is meant for boundary points where the terms decay only algebraically.
    """
    stop = stop or StoppingRule()
    validity = _check_mu(mu)
    if coeffs.radius is not None and _magnitude(x) > float(coeffs.radius):
        raise DomainError(f"|x| exceeds the radius of convergence of {coeffs.name}")
    if _is_zero(x):
        return _degenerate(coeffs, stop, validity)
    make_terms, bound = term_factory(coeffs, x, mu)
    return sum_outer(make_terms, mu, stop, bound, accelerate)


def transform_eval_paramfree(coeffs: CoefficientSource, x, mu, stop: Optional[StoppingRule] = None,
                             accelerate: bool = False) -> EvaluationReport:
    """Approximate f(x) with inner sums sum_k C(n,k) mu**(n-k) x**k a_k.

    For mu != 0 this is the parameterized series at argument x/mu; at
    mu = 0 only the k = n term survives and the raw Taylor series remains.
    """
    stop = stop or StoppingRule()
    validity = _check_mu(mu)
    if coeffs.radius is not None and _magnitude(x) > float(coeffs.radius):
        raise DomainError(f"|x| exceeds the radius of convergence of {coeffs.name}")
    if _is_zero(x):
        return _degenerate(coeffs, stop, validity)
    make_terms, bound = term_factory(coeffs, x, mu, paramfree=True)
    return sum_outer(make_terms, mu, stop, bound, accelerate)


def take_terms(make_terms, n_terms: int, prec: int = 256, argument_bound: float = 1.0) -> list:
    """The first ``n_terms`` outer terms at a cancellation-safe precision."""
    wp = PrecisionPolicy(prec).working_bits(n_terms, argument_bound)
    with working(wp):
        it = make_terms(wp)
        return [next(it) for _ in range(n_terms)]


def outer_terms(coeffs: CoefficientSource, x, mu, n_terms: int, prec: int = 256,
                paramfree: bool = True) -> list:
    """The first ``n_terms`` outer terms of either form."""
    make_terms, bound = term_factory(coeffs, x, mu, paramfree)
    return take_terms(make_terms, n_terms, prec, bound)


def exact_partial_sums(coeffs: CoefficientSource, x, mu, n_terms: int,
                       paramfree: bool = False) -> list[Fraction]:
    """Partial sums S_0..S_{n_terms-1} in exact rational arithmetic.

    Both forms are evaluated literally from their definitions (with
    0**0 = 1), without the x/mu substitution used by the real-valued path.
    """
    if not coeffs.exact:
        raise TypeError(f"{coeffs.name} has no exact coefficients")
    xq, mq = as_exact(x), as_exact(mu)
    if xq is None or mq is None:
        raise TypeError("exact mode needs rational x and mu")
    if mq == -1:
        raise ZeroDivisionError("mu = -1")
    a = [coeffs.coeff(k) for k in range(n_terms)]
    sums = []
    total = Fraction(0)
    row = [1]
    for n in range(n_terms):
        if n:
            row = next_row(row)
        if paramfree:
            inner = sum(row[k] * mq ** (n - k) * xq**k * a[k] for k in range(n + 1))
            total += inner / (mq + 1) ** (n + 1)
        else:
            inner = sum(row[k] * xq**k * a[k] for k in range(n + 1))
            total += mq**n * inner / (mq + 1) ** (n + 1)
        sums.append(total)
    return sums
