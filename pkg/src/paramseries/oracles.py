"""Reference values computed by classical methods.

Nothing here touches the transform engine: zeta comes from the
accelerated alternating eta series, gamma and digamma from
Euler-Maclaurin / asymptotic expansions, pi from Machin's formula and the
elliptic integrals from the arithmetic-geometric mean.  Each result
carries the error bound its method guarantees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from . import accel
from .errors import DomainError
from .exactmath import Real, bits_for, to_real, working

DEFAULT_ERROR = Fraction(1, 10**40)

# B_2j for j = 1..8
BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
)
# first coefficient past the table, used for truncation bounds
B18 = Fraction(43867, 798)


@dataclass(frozen=True)
class OracleValue:
    value: Real
    method: str
    claimed_error: Real

    def __float__(self):
        return float(self.value)


def _prec(target_error) -> int:
    return bits_for(target_error) + 24


def _ulps(prec: int, count: int = 16) -> Real:
    return gmpy2.mul_2exp(mpfr(count, 64), -prec)


def harmonic(n: int) -> Fraction:
    """Exact H_n."""
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


def zeta_ref(s, target_error=DEFAULT_ERROR) -> OracleValue:
    """Riemann zeta for real s > 1.

    Large s: direct summation with the integral tail bound.  Otherwise the
    alternating eta series summed by the Cohen-Villegas-Zagier scheme and
    rescaled by 1/(1 - 2**(1-s)).
    """
    prec = _prec(target_error)
    with working(prec):
        s = to_real(s, prec)
        if s <= 1:
            raise DomainError("zeta_ref needs s > 1")
        target = to_real(target_error, prec)
        for m in (2, 4, 8, 16, 32, 64):
            tail = mpfr(m) ** (1 - s) / (s - 1)
            if tail <= target / 4:
                total = mpfr(0)
                for j in range(m, 0, -1):
                    total += mpfr(j) ** (-s)
                return OracleValue(total, f"direct sum, {m} terms", tail + _ulps(prec))
        scale = 1 / (1 - 2 ** (1 - s))
        extra = max(0, math.ceil(float(gmpy2.log2(scale))))
        n = accel.alternating_terms_needed(bits_for(target_error) + 2 + extra)
        eta = accel.alternating_sum(lambda k: mpfr(k + 1) ** (-s), n, prec)
        bound = 2 * scale / (3 + gmpy2.sqrt(mpfr(8))) ** n
        return OracleValue(eta * scale, f"eta series, CVZ acceleration n={n}",
                           bound + _ulps(prec, 64))


def arctan_inverse(q: int, prec: int) -> tuple[Real, Real]:
    """arctan(1/q) by its Taylor series; returns (value, tail bound)."""
    with working(prec):
        y = 1 / mpfr(q)
        y2 = y * y
        power = y
        total = mpfr(0)
        j = 0
        eps = gmpy2.mul_2exp(mpfr(1), -prec)
        while True:
            term = power / (2 * j + 1)
            if term < eps:
                return total, term
            total = total + term if j % 2 == 0 else total - term
            power *= y2
            j += 1


def pi_ref(target_error=DEFAULT_ERROR) -> OracleValue:
    prec = _prec(target_error)
    with working(prec):
        a, ea = arctan_inverse(5, prec)
        b, eb = arctan_inverse(239, prec)
        value = 16 * a - 4 * b
        return OracleValue(value, "Machin 16 atan(1/5) - 4 atan(1/239)",
                           16 * ea + 4 * eb + _ulps(prec, 64))


def _em_truncation(t, terms_kept: int):
    # magnitude of the first dropped term B_2J / (2J t^2J)
    j = terms_kept + 1
    b = BERNOULLI[j - 1] if j <= len(BERNOULLI) else B18
    return abs(mpfr(b.numerator) / b.denominator) / (2 * j * t ** (2 * j))


def gamma_ref(target_error=DEFAULT_ERROR, n: int | None = None) -> OracleValue:
    """Euler's constant from H_n - ln n with Euler-Maclaurin corrections.

    When ``n`` is not given it is the smallest power of ten (at least 10**5)
    for which the Bernoulli table suffices.
    """
    if n is None:
        n = 10**5
        with working(_prec(target_error) + 32):
            while _em_truncation(mpfr(n), len(BERNOULLI)) > to_real(target_error, 64) / 2:
                n *= 10
    prec = _prec(target_error) + math.ceil(math.log2(n))
    with working(prec):
        target = to_real(target_error, prec)
        t = mpfr(n)
        for kept in range(1, len(BERNOULLI) + 1):
            truncation = _em_truncation(t, kept)
            if truncation <= target / 2:
                break
        else:
            raise DomainError(f"n = {n} is too small for target error {target_error}")
        h = mpfr(0)
        for j in range(n, 0, -1):
            h += 1 / mpfr(j)
        value = h - gmpy2.log(t) - 1 / (2 * t)
        for j in range(1, kept + 1):
            b = BERNOULLI[j - 1]
            value += mpfr(b.numerator) / b.denominator / (2 * j * t ** (2 * j))
        return OracleValue(value, f"Euler-Maclaurin, n={n}, {kept} Bernoulli terms",
                           truncation + _ulps(prec, 2 * n))


def digamma_ref(x, target_error=DEFAULT_ERROR) -> OracleValue:
    """psi(x) for x > 0 by upward shift and the asymptotic series."""
    prec = _prec(target_error) + 8
    with working(prec):
        x = to_real(x, prec)
        if x <= 0:
            raise DomainError("digamma_ref needs x > 0")
        target = to_real(target_error, prec)
        threshold = max(mpfr(20), (4 * abs(mpfr(B18.numerator) / B18.denominator) / (18 * target))
                        ** (mpfr(1) / 18))
        shift = max(0, math.ceil(float(threshold - x)))
        t = x + shift
        correction = mpfr(0)
        for j in range(shift - 1, -1, -1):
            correction += 1 / (x + j)
        value = gmpy2.log(t) - 1 / (2 * t)
        for j, b in enumerate(BERNOULLI, start=1):
            value -= mpfr(b.numerator) / b.denominator / (2 * j * t ** (2 * j))
        return OracleValue(value - correction, f"shift by {shift}, asymptotic series",
                           _em_truncation(t, len(BERNOULLI)) + _ulps(prec, 4 * shift + 64))


def polylog_ref(x, s, target_error=DEFAULT_ERROR) -> OracleValue:
    prec = _prec(target_error)
    with working(prec):
        xr, sr = to_real(x, prec), to_real(s, prec)
        if sr <= 1:
            raise DomainError("polylog_ref needs s > 1")
        if xr == 1:
            z = zeta_ref(s, target_error)
            return OracleValue(z.value, "zeta: " + z.method, z.claimed_error)
        if xr == -1:
            z = zeta_ref(s, target_error / 2)
            value = -(1 - 2 ** (1 - sr)) * z.value
            return OracleValue(value, "minus eta via zeta", z.claimed_error)
        if abs(xr) > mpfr("0.95"):
            raise DomainError("polylog_ref covers |x| <= 0.95 and x = +-1")
        target = to_real(target_error, prec)
        total = mpfr(0)
        power = xr
        k = 1
        while True:
            total += power / mpfr(k) ** sr
            power *= xr
            k += 1
            tail = abs(power) / (mpfr(k) ** sr * (1 - abs(xr)))
            if tail <= target / 2:
                return OracleValue(total, f"direct sum, {k - 1} terms", tail + _ulps(prec, k))


def _hurwitz_em(s, a, target, prec):
    # zeta(s, a) = sum_{n<M} (n+a)^-s + Euler-Maclaurin tail at t = M + a
    bmag = abs(mpfr(B18.numerator) / B18.denominator)
    m = 8
    while True:
        t = a + m
        rising = mpfr(1)
        for i in range(17):
            rising *= s + i
        dropped = bmag / mpfr(math.factorial(18)) * rising * t ** (-s - 17)
        if dropped <= target / 2:
            break
        m *= 2
    head = mpfr(0)
    for n in range(m - 1, -1, -1):
        head += (n + a) ** (-s)
    tail = t ** (1 - s) / (s - 1) + t ** (-s) / 2
    rising = s
    for j, b in enumerate(BERNOULLI, start=1):
        tail += mpfr(b.numerator) / b.denominator / math.factorial(2 * j) * rising * t ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return head + tail, m, dropped


def lerch_ref(x, a, s, target_error=DEFAULT_ERROR) -> OracleValue:
    """Phi(x, a, s) = sum x**n / (n+a)**s for real arguments."""
    prec = _prec(target_error)
    with working(prec):
        xr, ar, sr = to_real(x, prec), to_real(a, prec), to_real(s, prec)
        if ar <= 0 or sr <= 1:
            raise DomainError("lerch_ref needs a > 0 and s > 1")
        target = to_real(target_error, prec)
        if xr == 1:
            value, m, dropped = _hurwitz_em(sr, ar, target, prec)
            return OracleValue(value, f"Hurwitz zeta, Euler-Maclaurin at n={m}",
                               dropped + _ulps(prec, 4 * m))
        if xr == -1:
            head = ar ** (-sr)
            n = accel.alternating_terms_needed(bits_for(target_error) + 2 +
                                               max(0, math.ceil(float(gmpy2.log2(head)))))
            value = accel.alternating_sum(lambda k: (k + ar) ** (-sr), n, prec)
            return OracleValue(value, f"alternating series, CVZ n={n}",
                               2 * head / (3 + gmpy2.sqrt(mpfr(8))) ** n + _ulps(prec, 64))
        if abs(xr) > mpfr("0.95"):
            raise DomainError("lerch_ref covers |x| <= 0.95 and x = +-1")
        total = mpfr(0)
        power = mpfr(1)
        n = 0
        while True:
            total += power / (n + ar) ** sr
            power *= xr
            n += 1
            tail = abs(power) / ((n + ar) ** sr * (1 - abs(xr)))
            if tail <= target / 2:
                return OracleValue(total, f"direct sum, {n} terms", tail + _ulps(prec, n))


def _agm_sequence(x, prec):
    # yields (a_n, b_n, c_n) for the AGM started at (1, sqrt(1 - x^2))
    a = mpfr(1)
    b = gmpy2.sqrt(1 - x * x)
    c = abs(x)
    eps = gmpy2.mul_2exp(mpfr(1), -prec + 4)
    seq = [(a, b, c)]
    while abs(a - b) > eps:
        a, b, c = (a + b) / 2, gmpy2.sqrt(a * b), (a - b) / 2
        seq.append((a, b, c))
    a, b, c = (a + b) / 2, gmpy2.sqrt(a * b), (a - b) / 2
    seq.append((a, b, c))
    return seq


def elliptic_k_agm(x, target_error=DEFAULT_ERROR) -> OracleValue:
    """K(x) = pi / (2 AGM(1, sqrt(1-x^2))), modulus convention."""
    prec = _prec(target_error) + 8
    with working(prec):
        xr = to_real(x, prec)
        if abs(xr) >= 1:
            raise DomainError("elliptic_k_agm needs |x| < 1")
        seq = _agm_sequence(xr, prec)
        k = gmpy2.const_pi() / (2 * seq[-1][0])
        return OracleValue(k, f"AGM, {len(seq) - 1} steps", _ulps(prec, 64) * k)


def elliptic_e_agm(x, target_error=DEFAULT_ERROR) -> OracleValue:
    """E(x) = K(x) (1 - sum 2^(n-1) c_n^2) along the AGM."""
    prec = _prec(target_error) + 8
    with working(prec):
        xr = to_real(x, prec)
        if abs(xr) >= 1:
            raise DomainError("elliptic_e_agm needs |x| < 1")
        seq = _agm_sequence(xr, prec)
        k = gmpy2.const_pi() / (2 * seq[-1][0])
        acc = mpfr(0)
        for n, (_, _, c) in enumerate(seq):
            acc += gmpy2.mul_2exp(c * c, n - 1)
        return OracleValue(k * (1 - acc), f"AGM c_n accumulation, {len(seq) - 1} steps",
                           _ulps(prec, 256) * k)


def m_ref(target_error=DEFAULT_ERROR) -> OracleValue:
    """M = sum_{n>=1} H_n (zeta(n+1) - 1).

    Uses 2^-(n+1) < zeta(n+1) - 1 < 2^-(n+1) (1 + 2/n) and H_n <= n, so
    the tail past N is below (3/2)(N+2) 2^-N.
    """
    prec = _prec(target_error) + 16
    with working(prec):
        target = to_real(target_error, prec)
        n_max = 1
        while mpfr(3) / 2 * (n_max + 2) * gmpy2.mul_2exp(mpfr(1), -n_max) > target / 2:
            n_max += 1
        z_err = target / (4 * n_max * n_max)
        total = mpfr(0)
        h = mpfr(0)
        worst = mpfr(0)
        for n in range(1, n_max + 1):
            h += mpfr(1) / n
            z = zeta_ref(n + 1, z_err)
            total += h * (z.value - 1)
            worst += h * z.claimed_error
        tail = mpfr(3) / 2 * (n_max + 2) * gmpy2.mul_2exp(mpfr(1), -n_max)
        return OracleValue(total, f"sum H_n (zeta(n+1) - 1), {n_max} terms",
                           tail + worst + _ulps(prec, 4 * n_max))


def loggamma_ref(x, target_error=DEFAULT_ERROR) -> OracleValue:
    """ln Gamma(x) for x > 0: shift up, then Stirling's series."""
    prec = _prec(target_error) + 8
    with working(prec):
        x = to_real(x, prec)
        if x <= 0:
            raise DomainError("loggamma_ref needs x > 0")
        target = to_real(target_error, prec)
        bmag = abs(mpfr(B18.numerator) / B18.denominator)
        threshold = max(mpfr(20), (4 * bmag / (18 * 17 * target)) ** (mpfr(1) / 17))
        shift = max(0, math.ceil(float(threshold - x)))
        t = x + shift
        log_product = mpfr(0)
        for j in range(shift):
            log_product += gmpy2.log(x + j)
        value = (t - mpfr(0.5)) * gmpy2.log(t) - t + gmpy2.log(2 * gmpy2.const_pi()) / 2
        for j, b in enumerate(BERNOULLI, start=1):
            value += mpfr(b.numerator) / b.denominator / (2 * j * (2 * j - 1) * t ** (2 * j - 1))
        dropped = bmag / (18 * 17 * t**17)
        return OracleValue(value - log_product, f"shift by {shift}, Stirling series",
                           dropped + _ulps(prec, 4 * shift + 64))
