"""Taylor coefficient sources for every series the library transforms."""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

from ..exactmath import as_exact, to_real, working
from ..oracles import zeta_ref
from ..transform import CoefficientSource


class ZetaTable:
    """Memo of zeta(s) at integer s, filled from the zeta oracle.

    The largest precision computed so far is kept and rounded down on
    request.  ``inject_fault`` perturbs one entry; it exists so the
    verification suite can prove it notices a corrupted coefficient.
    """

    def __init__(self):
        self._values: dict[int, object] = {}
        self._faults: dict[int, Fraction] = {}
        self._lock = threading.Lock()

    def __call__(self, s: int, prec: int):
        with self._lock:
            hit = self._values.get(s)
            fault = self._faults.get(s)
        if hit is None or hit.precision < prec:
            hit = zeta_ref(s, Fraction(1, 2 ** (prec + 4))).value
            hit = mpfr(hit, prec + 4)
            with self._lock:
                old = self._values.get(s)
                if old is None or old.precision < hit.precision:
                    self._values[s] = hit
        value = mpfr(hit, prec)
        if fault is not None:
            with working(prec):
                value = value + to_real(fault, prec)
        return value

    def inject_fault(self, s: int, delta) -> None:
        with self._lock:
            self._faults[s] = Fraction(delta)

    def clear_faults(self) -> None:
        with self._lock:
            self._faults.clear()


ZETA = ZetaTable()


def zeta_minus_one(s: int, prec: int):
    # zeta(s) - 1 keeps full relative accuracy only if zeta itself is
    # computed with s extra bits
    with working(prec + s):
        return mpfr(ZETA(s, prec + s) - 1, prec)


def s_series(k: int, prec: int):
    """S(k) = sum_{n>=1} 1/(2**n + k).

    The first N terms are summed directly with 2**N >= (k+1) 2**32, and the
    remainder uses sum_j (-k)**j 2**(-N(j+1)) / (2**(j+1) - 1).
    """
    if k == 0:
        return mpfr(1, prec)
    with working(prec + 16):
        n_head = max(1, (k + 1).bit_length() + 32)
        total = mpfr(0)
        for n in range(n_head, 0, -1):
            total += 1 / mpfr(2**n + k)
        eps = gmpy2.mul_2exp(mpfr(1), -prec - 8)
        j = 0
        while True:
            term = mpfr((-k) ** j) / (2 ** (j + 1) - 1)
            term = gmpy2.mul_2exp(term, -n_head * (j + 1))
            total += term
            if abs(term) < eps:
                break
            j += 1
        return mpfr(total, prec)


def geometric() -> CoefficientSource:
    return CoefficientSource("geometric", lambda k, p: 1, radius=1, exact=True)


def log_one_plus() -> CoefficientSource:
    """ln(1 + t)."""
    return CoefficientSource(
        "log1p", lambda k, p: Fraction((-1) ** (k - 1), k) if k else 0, radius=1, exact=True
    )


def exp_neg() -> CoefficientSource:
    """exp(-t)."""
    return CoefficientSource("expneg", lambda k, p: Fraction((-1) ** k, math.factorial(k)), exact=True)


@lru_cache(maxsize=None)
def _binomial_beta(beta):
    bq = as_exact(beta)
    if bq is not None:
        def coeff(k, p):
            c = Fraction(1)
            for i in range(k):
                c = c * (bq - i) / (i + 1)
            return c

        terminating = bq.denominator == 1 and bq >= 0
        return CoefficientSource(f"binomial[{beta}]", coeff,
                                 radius=None if terminating else 1, exact=True)

    def coeff_real(k, p):
        with working(p + 16):
            b = to_real(beta, p + 16)
            c = mpfr(1)
            for i in range(k):
                c = c * (b - i) / (i + 1)
            return c

    return CoefficientSource(f"binomial[{beta}]", coeff_real, radius=1)


def binomial_beta(beta) -> CoefficientSource:
    """(1 + t)**beta with generalized binomial coefficients."""
    return _binomial_beta(str(beta) if isinstance(beta, float) else beta)


def _power_reciprocal(offset, s, name, radius):
    # a_k = 1 / (k + offset)**s, exact when offset is rational and s a nonnegative integer
    oq, sq = as_exact(offset), as_exact(s)
    if oq is not None and sq is not None and sq.denominator == 1 and sq >= 0:
        e = int(sq)
        return CoefficientSource(name, lambda k, p: 1 / (k + oq) ** e, radius=radius, exact=True)

    def coeff(k, p):
        with working(p + 8):
            return (k + to_real(offset, p + 8)) ** (-to_real(s, p + 8))

    return CoefficientSource(name, coeff, radius=radius)


@lru_cache(maxsize=None)
def lerch_terms(a, s) -> CoefficientSource:
    """Taylor coefficients 1/(k+a)**s of Phi(t, a, s)."""
    return _power_reciprocal(a, s, f"lerch[a={a},s={s}]", 1)


@lru_cache(maxsize=None)
def polylog_terms(s) -> CoefficientSource:
    """Li_s(t)/t = sum t**k / (k+1)**s."""
    return _power_reciprocal(1, s, f"polylog[s={s}]", 1)


@lru_cache(maxsize=None)
def digamma_taylor_neg() -> CoefficientSource:
    """-(psi(1-t) + gamma) = sum_{k>=1} zeta(k+1) t**k."""
    return CoefficientSource("digamma-neg", lambda k, p: ZETA(k + 1, p) if k else 0, radius=1)


@lru_cache(maxsize=None)
def digamma_taylor_pos() -> CoefficientSource:
    """psi(1+t) + gamma = sum_{k>=1} (-1)**(k-1) zeta(k+1) t**k."""
    return CoefficientSource(
        "digamma-pos", lambda k, p: (-1) ** (k - 1) * ZETA(k + 1, p) if k else 0, radius=1
    )


@lru_cache(maxsize=None)
def loggamma_terms() -> CoefficientSource:
    """(ln Gamma(1+t) + gamma t) / t."""

    def coeff(k, p):
        if k == 0:
            return 0
        with working(p):
            return (-1) ** (k - 1) * ZETA(k + 1, p) / (k + 1)

    return CoefficientSource("loggamma", coeff, radius=1)


@lru_cache(maxsize=None)
def m_terms() -> CoefficientSource:
    """Integrand series of M: sum_{k>=1} (-1)**(k-1) zeta(k+1) t**k / k."""

    def coeff(k, p):
        if k == 0:
            return 0
        with working(p):
            return (-1) ** (k - 1) * ZETA(k + 1, p) / k

    return CoefficientSource("m-constant", coeff, radius=1)


@lru_cache(maxsize=None)
def gamma_shifted_terms() -> CoefficientSource:
    """Coefficients (-1)**(k-1) (zeta(k+1) - 1)/(k+1), k >= 1."""

    def coeff(k, p):
        if k == 0:
            return 0
        with working(p):
            return (-1) ** (k - 1) * zeta_minus_one(k + 1, p) / (k + 1)

    return CoefficientSource("gamma-shifted", coeff, radius=2)


@lru_cache(maxsize=None)
def amore_terms() -> CoefficientSource:
    """((3/4)**k - (1/4)**k) zeta(k+1): -(psi(1-t)+gamma) sampled at 3t/4 minus t/4."""

    def coeff(k, p):
        if k == 0:
            return 0
        with working(p):
            return to_real(Fraction(3**k - 1, 4**k), p) * ZETA(k + 1, p)

    return CoefficientSource("amore", coeff, radius=Fraction(4, 3))


@lru_cache(maxsize=None)
def alzer_koumandos_terms() -> CoefficientSource:
    return CoefficientSource("alzer-koumandos", lambda k, p: (-1) ** k * s_series(k, p), radius=1)


def central_binomial_ratio(k: int) -> Fraction:
    return Fraction(math.comb(2 * k, k), 4**k)


@lru_cache(maxsize=None)
def elliptic_k_terms(unsquared: bool = False) -> CoefficientSource:
    """(2/pi) K as a series in t = x**2.

    The standard coefficients are (C(2k,k)/4**k)**2.  ``unsquared`` keeps
    the unsquared C(2k,k)/16**k so the discrepancy can be measured.
    """
    if unsquared:
        return CoefficientSource("elliptic-k-unsquared",
                                 lambda k, p: Fraction(math.comb(2 * k, k), 16**k), radius=1, exact=True)
    return CoefficientSource("elliptic-k", lambda k, p: central_binomial_ratio(k) ** 2,
                             radius=1, exact=True)


@lru_cache(maxsize=None)
def elliptic_e_terms(unsquared: bool = False) -> CoefficientSource:
    if unsquared:
        return CoefficientSource(
            "elliptic-e-unsquared",
            lambda k, p: Fraction(math.comb(2 * k, k), 16**k * (1 - 2 * k)), radius=1, exact=True)
    return CoefficientSource("elliptic-e", lambda k, p: central_binomial_ratio(k) ** 2 / (1 - 2 * k),
                             radius=1, exact=True)


CATALOG = {
    "Geometric": geometric,
    "LogOnePlus": log_one_plus,
    "ExpNeg": exp_neg,
    "BinomialBeta": binomial_beta,
    "LerchTerms": lerch_terms,
    "PolylogTerms": polylog_terms,
    "DigammaTaylorNeg": digamma_taylor_neg,
    "DigammaTaylorPos": digamma_taylor_pos,
    "EllipticK": elliptic_k_terms,
    "EllipticE": elliptic_e_terms,
    "AmoreTerms": amore_terms,
}

# sources whose coefficients are read from ZETA and therefore cache them
_ZETA_SOURCES = (digamma_taylor_neg, digamma_taylor_pos, loggamma_terms, m_terms,
                 gamma_shifted_terms, amore_terms)


def inject_zeta_fault(s: int, delta) -> None:
    """Perturb zeta(s) by ``delta`` everywhere it is read as a coefficient."""
    ZETA.inject_fault(s, delta)
    for factory in _ZETA_SOURCES:
        factory.cache_clear()


def clear_zeta_faults() -> None:
    ZETA.clear_faults()
    for factory in _ZETA_SOURCES:
        factory.cache_clear()
