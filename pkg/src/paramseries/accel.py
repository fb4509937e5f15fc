"""Sequence acceleration used where plain partial sums are too slow."""

from __future__ import annotations

import math

import gmpy2
from gmpy2 import mpfr

from .exactmath import working


def levin_u(terms, start: int, order: int, prec: int, beta: int = 1):
    """Levin u-transform of the series ``sum(terms)``.

    Uses the partial sums ``S[start] .. S[start+order]`` with remainder
    estimates ``(beta + m) * terms[m]``.  Returns None when a term in the
    window vanishes (the transform is undefined there).
    """
    if start + order >= len(terms):
        raise ValueError("not enough terms for the requested order")
    with working(prec):
        partial = mpfr(0)
        for t in terms[:start]:
            partial += t
        num = mpfr(0)
        den = mpfr(0)
        last = mpfr(beta + start + order)
        for j in range(order + 1):
            m = start + j
            t = terms[m]
            partial += t
            if t == 0:
                return None
            c = math.comb(order, j) * (mpfr(beta + m) / last) ** (order - 2) / t
            if j % 2:
                c = -c
            num += c * partial
            den += c
        if den == 0:
            return None
        return num / den


def alternating_sum(term, n: int, prec: int):
    """Cohen-Rodriguez Villegas-Zagier sum of ``sum_{k>=0} (-1)**k term(k)``.

    For totally monotone ``term`` the error is at most
    ``2 * term(0) / (3 + sqrt(8))**n``.
    """
    with working(prec):
        d = (3 + gmpy2.sqrt(mpfr(8))) ** n
        d = (d + 1 / d) / 2
        b = mpfr(-1)
        c = -d
        s = mpfr(0)
        for k in range(n):
            c = b - c
            s += c * term(k)
            b = b * (k + n) * (k - n) / ((k + mpfr(0.5)) * (k + 1))
        return s / d


def alternating_terms_needed(error_bits: int) -> int:
    # log2(3 + sqrt(8)) = 2.5431...
    return math.ceil((error_bits + 2) / 2.543106606327) + 1
