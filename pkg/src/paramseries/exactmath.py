"""Exact integers and rationals, plus the precision contract for reals.

Real values are ``gmpy2.mpfr``.  Precision is never taken from ambient
state: every helper receives ``prec`` in bits and evaluates inside a
scoped, thread-local gmpy2 context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpfr

Real = type(mpfr(0))

EXTRA_BITS = 32


def binomial(n: int, k: int) -> int:
    """Exact C(n, k); zero when k > n."""
    if n < 0 or k < 0:
        raise ValueError("binomial needs nonnegative arguments")
    return math.comb(n, k)


def binomial_row(n: int) -> list[int]:
    """Row ``n`` of Pascal's triangle built by the additive recurrence."""
    if n < 0:
        raise ValueError("row index must be nonnegative")
    row = [1]
    for _ in range(n):
        row = next_row(row)
    return row


def next_row(row: list[int]) -> list[int]:
    # O(n) exact additions
    return [1, *map(int.__add__, row, row[1:]), 1]


def working(prec: int):
    """Context manager that evaluates mpfr arithmetic at ``prec`` bits."""
    return gmpy2.context(gmpy2.get_context(), precision=prec)


def to_real(value, prec: int) -> Real:
    """Round ``value`` (int, Fraction, float, decimal string, mpfr) to ``prec`` bits."""
    if isinstance(value, Real):
        return mpfr(value, prec)
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return mpfr(value, prec)
    if isinstance(value, Rational):
        return mpfr(gmpy2.mpq(value.numerator, value.denominator), prec)
    if isinstance(value, float):
        return mpfr(value, prec)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            return to_real(Fraction(text), prec)
        return mpfr(text, prec)
    raise TypeError(f"cannot convert {type(value).__name__} to a real")


def as_exact(value):
    """Return ``value`` as a Fraction when it is exactly rational, else None."""
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            return None
    return None


def to_fixed(value: Real, bits: int) -> int:
    """Fixed-point image ``round(value * 2**bits)`` as a Python int."""
    return int(gmpy2.rint(gmpy2.mul_2exp(value, bits)))


def from_fixed(value: int, bits: int, prec: int) -> Real:
    return gmpy2.mul_2exp(mpfr(value, prec), -bits)


def bits_for(tolerance) -> int:
    """Smallest bit count whose unit roundoff is below ``tolerance``."""
    tol = to_real(tolerance, 64)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return max(1, int(math.ceil(-float(gmpy2.log2(tol)))))


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision for a run of at most ``N`` binomial-weighted terms.

    An inner sum of row ``n`` can cancel about ``n`` bits (the row sums to
    ``2**n``), and about ``n*log2(1+|x|)`` bits when the argument is
    larger than one, so the guard grows linearly with the term budget.
    """

    target_bits: int = 256

    def __post_init__(self):
        if self.target_bits <= 0:
            raise ValueError("target_bits must be positive")

    def guard_bits(self, n_terms: int, argument_bound: float = 1.0) -> int:
        growth = max(1, math.ceil(math.log2(1.0 + abs(argument_bound))))
        return n_terms * growth + EXTRA_BITS

    def working_bits(self, n_terms: int, argument_bound: float = 1.0) -> int:
        return self.target_bits + self.guard_bits(n_terms, argument_bound)
