"""How the free parameter changes the cost of reaching a tolerance.

Errors here are always measured against an independent reference value,
never against the engine's own tail estimate.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpfr

from .errors import InvalidMu, NoConvergentMu, NotConverged
from .exactmath import Real, as_exact, bits_for, to_real, working
from .specialfn import registry
from .transform import MuValidity, StoppingRule, mu_validity

GRID_POINTS = 17
GOLDEN_STEPS = 12
# 1/phi to ten digits; refinement points are rounded to this denominator
INV_PHI = Fraction(6180339887, 10**10)
MAX_DENOMINATOR = 10**6


def _as_number(v):
    if isinstance(v, float):
        v = str(v)
    q = as_exact(v)
    return q if q is not None else to_real(v, 256)


@dataclass(frozen=True)
class SweepRecord:
    """One grid point.  ``terms_to_tolerance`` is None when not reached."""

    mu: object
    terms_to_tolerance: int | None
    final_error: Real
    tolerance: object

    @property
    def reached(self) -> bool:
        return self.terms_to_tolerance is not None


@dataclass(frozen=True)
class StudyConfig:
    representation: str
    params: dict = field(default_factory=dict)
    mu_grid: tuple = ()
    tolerance: object = Fraction(1, 10**10)
    max_terms: int = 1000
    precision: int = 256

    def __post_init__(self):
        registry.get(self.representation)
        object.__setattr__(self, "mu_grid", tuple(_as_number(m) for m in self.mu_grid))
        for mu in self.mu_grid:
            if mu_validity(mu) is MuValidity.INVALID:
                raise InvalidMu(f"mu = {mu} is outside the convergent range")

    def stopping_rule(self) -> StoppingRule:
        return StoppingRule(tolerance=self.tolerance, max_terms=self.max_terms,
                            target_bits=self.precision)


def _reference(rep, params, tolerance, precision):
    err = Fraction(1, 2 ** (max(precision, bits_for(tolerance)) + 16))
    return rep.reference(params, err)


def _measure(rep, params, mu, stop, ref) -> SweepRecord:
    try:
        report = rep.run(params, mu, stop)
        converged = report.converged
    except NotConverged as exc:
        report, converged = exc.report, False
    prec = ref.precision
    with working(prec):
        if report is None:
            error = mpfr("inf")
        else:
            error = abs(to_real(report.value, prec) - ref)
        reached = converged and error <= to_real(stop.tolerance, prec)
    terms = report.terms_used if reached else None
    return SweepRecord(mu, terms, error, stop.tolerance)


def mu_sweep(cfg: StudyConfig) -> list[SweepRecord]:
    """One record per grid point, in grid order."""
    rep = registry.get(cfg.representation)
    stop = cfg.stopping_rule()
    ref = _reference(rep, cfg.params, cfg.tolerance, cfg.precision)
    return [_measure(rep, cfg.params, mu, stop, ref) for mu in cfg.mu_grid]


def error_curve(representation: str, params: dict | None, mu, n_max: int,
                precision: int = 256) -> list[tuple[int, Real]]:
    """[(N, |S_N - reference|)] for N = 1..n_max, S_N using N outer terms."""
    if n_max < 1:
        return []
    rep = registry.get(representation)
    sums = rep.partial_sums(params, mu, n_max, precision)
    ref = rep.reference(params, Fraction(1, 2 ** (precision + 64)))
    wp = max(s.precision for s in sums)
    with working(wp):
        return [(n, abs(s - ref)) for n, s in enumerate(sums, start=1)]


def fitted_decay_rate(curve, start: int | None = None) -> float:
    """Least-squares slope of ln(error) against N over the tail of ``curve``.

    By default the fit uses the second half of the points.  Zero errors
    are skipped.
    """
    if start is None:
        start = curve[len(curve) // 2][0] if curve else 0
    pts = [(n, math.log(float(e))) for n, e in curve if n >= start and e > 0]
    if len(pts) < 2:
        raise ValueError("need at least two nonzero errors to fit a slope")
    xs, ys = zip(*pts)
    return statistics.linear_regression(xs, ys).slope


def _key(rec: SweepRecord):
    terms = rec.terms_to_tolerance if rec.reached else math.inf
    return (terms, float(rec.final_error), rec.mu)


def _round(mu):
    return mu.limit_denominator(MAX_DENOMINATOR) if isinstance(mu, Fraction) else mu


def optimal_mu(representation: str, params: dict | None, tolerance, interval,
               max_terms: int = 1000, precision: int = 256):
    """(mu_star, terms) minimizing terms to tolerance over ``interval``.

    A 17-point grid is followed by one golden-section pass on the bracket
    around the best grid point.  The final error breaks ties, then the
    smaller mu.
    """
    lo, hi = (_as_number(v) for v in interval)
    if lo > hi:
        raise ValueError("interval must satisfy lo <= hi")
    cfg = StudyConfig(representation, dict(params or {}), (lo, hi), tolerance, max_terms, precision)
    rep = registry.get(representation)
    stop = cfg.stopping_rule()
    ref = _reference(rep, cfg.params, tolerance, precision)
    seen: dict = {}

    def probe(mu):
        if mu not in seen:
            seen[mu] = _measure(rep, cfg.params, mu, stop, ref)
        return seen[mu]

    if lo == hi:
        rec = probe(lo)
        if not rec.reached:
            raise NoConvergentMu(f"mu = {lo} does not reach the tolerance")
        return lo, rec.terms_to_tolerance

    grid = [lo + (hi - lo) * i / (GRID_POINTS - 1) for i in range(GRID_POINTS)]
    records = [probe(mu) for mu in grid]
    best = min(range(GRID_POINTS), key=lambda i: _key(records[i]))
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, GRID_POINTS - 1)]
    c = _round(b - (b - a) * INV_PHI)
    d = _round(a + (b - a) * INV_PHI)
    for _ in range(GOLDEN_STEPS):
        if _key(probe(c)) <= _key(probe(d)):
            b, d = d, c
            c = _round(b - (b - a) * INV_PHI)
        else:
            a, c = c, d
            d = _round(a + (b - a) * INV_PHI)

    winner = min(seen.values(), key=_key)
    if not winner.reached:
        raise NoConvergentMu(f"no mu in [{lo}, {hi}] reaches tolerance {tolerance}")
    return winner.mu, winner.terms_to_tolerance
