"""Named representations with their evaluator, oracle and raw partial sums.

The registry is what the studies and the command line work from: a
representation id plus a parameter dict fully determines a target value
and a series for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import gmpy2
from gmpy2 import mpfr

from .. import oracles
from ..errors import DomainError
from ..exactmath import PrecisionPolicy, Real, as_exact, to_real, working
from ..transform import EvaluationReport, StoppingRule, term_factory, transform_eval_paramfree
from . import constants, functions, sources


# precision of real scale factors; partial sums beyond this are not meaningful
FACTOR_BITS = 1024


@dataclass(frozen=True)
class Component:
    """One outer series: ``make_terms(wp)`` with its argument bound and a scale."""

    make_terms: Callable
    bound: float
    factor: object = 1


@dataclass(frozen=True)
class Representation:
    id: str
    target: str
    defaults: dict
    evaluate: Callable
    oracle: Callable
    components: Callable | None = None
    offset: Callable | None = None
    description: str = ""
    required: tuple = field(default=())

    def resolve(self, params: dict | None) -> dict:
        merged = dict(self.defaults)
        for key, value in (params or {}).items():
            if key not in self.defaults and key not in self.required:
                raise DomainError(f"{self.id} takes no parameter {key!r}")
            merged[key] = value
        missing = [k for k in self.required if k not in merged]
        if missing:
            raise DomainError(f"{self.id} needs parameters {missing}")
        return merged

    def run(self, params, mu, stop: StoppingRule | None = None) -> EvaluationReport:
        return self.evaluate(self.resolve(params), mu, stop or StoppingRule())

    def reference(self, params, target_error=oracles.DEFAULT_ERROR) -> Real:
        return self.oracle(self.resolve(params), target_error).value

    def partial_sums(self, params, mu, n_max: int, prec: int = 256) -> list[Real]:
        """Partial sums S_1..S_{n_max} (S_N uses outer terms 0..N-1)."""
        if self.components is None:
            raise NotImplementedError(f"{self.id} has no outer series")
        p = self.resolve(params)
        parts = self.components(p, mu)
        bound = max((c.bound for c in parts), default=1.0)
        wp = PrecisionPolicy(prec).working_bits(n_max, bound)
        with working(wp):
            offset = to_real(self.offset(p, mu, wp), wp) if self.offset else mpfr(0)
            streams = [(c.make_terms(wp), to_real(c.factor, wp)) for c in parts]
            sums = []
            total = mpfr(0)
            for _ in range(n_max):
                for it, f in streams:
                    total += f * next(it)
                sums.append(total + offset)
            return sums


def _paramfree(source_fn, arg_fn=lambda p: p["x"], factor_fn=lambda p: 1):
    def components(p, mu):
        make, bound = term_factory(source_fn(p), arg_fn(p), mu, paramfree=True)
        return [Component(make, bound, factor_fn(p))]

    def evaluate(p, mu, stop):
        report = transform_eval_paramfree(source_fn(p), arg_fn(p), mu, stop)
        return functions.scaled(report, factor_fn(p))

    return components, evaluate


def _closed(fn):
    def oracle(p, err):
        prec = max(64, math.ceil(-math.log2(float(err)))) + 64
        with working(prec):
            return oracles.OracleValue(fn(p, prec), "closed form", err)
    return oracle


def _x(p, prec):
    return to_real(p["x"], prec)


_GEOMETRIC = _paramfree(lambda p: sources.geometric())
_LOG1P = _paramfree(lambda p: sources.log_one_plus())
_EXPNEG = _paramfree(lambda p: sources.exp_neg())
_BINOMIAL = _paramfree(lambda p: sources.binomial_beta(p["beta"]))


def _zeta_components(p, mu):
    make, bound = term_factory(sources.lerch_terms(1, p["s"]), -1, mu, paramfree=True)
    with working(FACTOR_BITS):
        factor = 1 / (1 - 2 ** (1 - to_real(p["s"], FACTOR_BITS)))
    return [Component(make, bound, factor)]


def _lerch_components(p, mu):
    # the parameter is tied to x for this representation
    make, bound = term_factory(sources.lerch_terms(p["a"], p["s"]), -1, p["x"])
    return [Component(make, bound)]


def _polylog_components(p, mu):
    make, bound = term_factory(sources.polylog_terms(p["s"]), p["x"], mu, paramfree=True)
    return [Component(make, bound, p["x"])]


def _pi_digamma_components(p, mu):
    src = sources.digamma_taylor_pos()
    up, b1 = term_factory(src, Fraction(-1, 4), mu, paramfree=True)
    down, b2 = term_factory(src, Fraction(-3, 4), mu, paramfree=True)
    return [Component(up, b1, 1), Component(down, b2, -1)]


def _square(p):
    return functions._square(p["x"])


def _half_pi(p):
    with working(FACTOR_BITS):
        return gmpy2.const_pi() / 2


def _laguerre_components(p, mu):
    if to_real(mu, 64) == 0:
        raise DomainError("the Laguerre form needs mu != 0")
    bound = abs(float(to_real(p["x"], 64)) / float(to_real(mu, 64)))
    return [Component(functions.laguerre_terms(p["x"], mu), bound)]


def _simple(source):
    return _paramfree(lambda p: source(), arg_fn=lambda p: 1)


_AMORE = _simple(sources.amore_terms)
_GAMMA_LOGGAMMA = _paramfree(lambda p: sources.loggamma_terms(), arg_fn=lambda p: 1)
_GAMMA_ZETA_TAIL = _simple(sources.gamma_shifted_terms)
_GAMMA_DYADIC = _simple(sources.alzer_koumandos_terms)
_M = _simple(sources.m_terms)
_DIGAMMA = _paramfree(lambda p: sources.digamma_taylor_pos())
_LOGGAMMA = _paramfree(lambda p: sources.loggamma_terms(), factor_fn=lambda p: p["x"])
_ELLIPTIC_K = _paramfree(lambda p: sources.elliptic_k_terms(p["unsquared"]), _square, _half_pi)
_ELLIPTIC_E = _paramfree(lambda p: sources.elliptic_e_terms(p["unsquared"]), _square, _half_pi)


def _prefix_offset(p, mu, prec):
    return constants.accelerated_gamma_prefix(mu, p["variant"], prec)


def _gamma(p, err):
    return oracles.gamma_ref(err)


def _pi(p, err):
    return oracles.pi_ref(err)


def _binomial_closed(p, prec):
    return (1 + _x(p, prec)) ** to_real(p["beta"], prec)


REGISTRY: dict[str, Representation] = {}


def register(rep: Representation) -> Representation:
    REGISTRY[rep.id] = rep
    return rep


def get(rep_id: str) -> Representation:
    try:
        return REGISTRY[rep_id]
    except KeyError:
        raise DomainError(f"unknown representation {rep_id!r}; "
                          f"choose from {', '.join(sorted(REGISTRY))}") from None


register(Representation(
    "geometric", "1/(1-x)", {"x": Fraction(1, 2)},
    evaluate=_GEOMETRIC[1], components=_GEOMETRIC[0],
    oracle=_closed(lambda p, prec: 1 / (1 - _x(p, prec))),
    description="geometric series, |x| < 1"))
register(Representation(
    "log1p", "ln(1+x)", {"x": Fraction(1, 2)},
    evaluate=_LOG1P[1], components=_LOG1P[0],
    oracle=_closed(lambda p, prec: gmpy2.log1p(_x(p, prec))),
    description="logarithm, -1 < x <= 1"))
register(Representation(
    "expneg", "exp(-x)", {"x": Fraction(1, 2)},
    evaluate=_EXPNEG[1], components=_EXPNEG[0],
    oracle=_closed(lambda p, prec: gmpy2.exp(-_x(p, prec))),
    description="exp(-x), any real x"))
register(Representation(
    "binomial", "(1+x)**beta", {"x": Fraction(1, 2), "beta": Fraction(1, 2)},
    evaluate=_BINOMIAL[1], components=_BINOMIAL[0],
    oracle=_closed(_binomial_closed),
    description="binomial series, |x| < 1"))
register(Representation(
    "zeta", "zeta(s)", {"s": 2},
    evaluate=lambda p, mu, stop: functions.zeta_hasse(p["s"], mu, stop),
    components=_zeta_components,
    oracle=lambda p, err: oracles.zeta_ref(p["s"], err),
    description="Riemann zeta from the alternating Hasse-type series, s > 1"))
register(Representation(
    "lerch", "Phi(-x, a, s)", {"x": 1, "a": 1, "s": 2},
    evaluate=lambda p, mu, stop: functions.lerch_param(p["x"], p["a"], p["s"], stop),
    components=_lerch_components,
    oracle=lambda p, err: oracles.lerch_ref(-_as_number(p["x"]), p["a"], p["s"], err),
    description="Lerch transcendent at -x with the parameter tied to x; mu is ignored"))
register(Representation(
    "polylog", "Li_s(x)", {"x": 1, "s": 2},
    evaluate=lambda p, mu, stop: functions.polylog_param(p["x"], p["s"], mu, stop),
    components=_polylog_components,
    oracle=lambda p, err: oracles.polylog_ref(p["x"], p["s"], err),
    description="polylogarithm, |x| <= 1, s > 1"))
register(Representation(
    "pi-amore", "pi", {},
    evaluate=lambda p, mu, stop: constants.amore_pi(mu, stop),
    components=_AMORE[0], oracle=_pi,
    description="pi from zeta values weighted by (3**k - 1)/4**k"))
register(Representation(
    "pi-digamma", "pi", {},
    evaluate=lambda p, mu, stop: constants.pi_via_digamma(mu, stop),
    components=_pi_digamma_components, oracle=_pi,
    description="pi as psi(3/4) - psi(1/4) from the digamma series"))
register(Representation(
    "digamma", "psi(1+x) + gamma", {"x": Fraction(1, 2)},
    evaluate=lambda p, mu, stop: functions.digamma_param(p["x"], mu, stop),
    components=_DIGAMMA[0],
    oracle=lambda p, err: _digamma_shifted(p["x"], err),
    description="digamma plus Euler's constant, -1 < x <= 1"))
register(Representation(
    "loggamma", "ln Gamma(1+x) + gamma*x", {"x": Fraction(1, 2)},
    evaluate=lambda p, mu, stop: functions.loggamma_param(p["x"], mu, stop),
    components=_LOGGAMMA[0],
    oracle=lambda p, err: _loggamma_shifted(p["x"], err),
    description="log-gamma plus gamma*x, -1 < x <= 1"))
register(Representation(
    "gamma-loggamma", "gamma", {},
    evaluate=lambda p, mu, stop: constants.euler_gamma_param(mu, stop),
    components=_GAMMA_LOGGAMMA[0], oracle=_gamma,
    description="Euler's constant from the log-gamma series at x = 1"))
register(Representation(
    "gamma-zeta-tail", "gamma", {"variant": constants.PrefixVariant.CONSTANT.value},
    evaluate=lambda p, mu, stop: constants.euler_gamma_accel(mu, p["variant"], stop),
    components=_GAMMA_ZETA_TAIL[0], offset=_prefix_offset, oracle=_gamma,
    description="Euler's constant from zeta(k+1) - 1 with a closed-form prefix; "
                "variant constant, mu-dependent or shifted"))
register(Representation(
    "gamma-dyadic", "gamma", {},
    evaluate=lambda p, mu, stop: constants.alzer_koumandos_gamma(mu, stop),
    components=_GAMMA_DYADIC[0], oracle=_gamma,
    description="Euler's constant from S(k) = sum_j 1/(2**j + k)"))
register(Representation(
    "elliptic-k", "K(x)", {"x": Fraction(1, 2), "unsquared": False},
    evaluate=lambda p, mu, stop: functions.elliptic_k_param(p["x"], mu, stop, p["unsquared"]),
    components=_ELLIPTIC_K[0],
    oracle=lambda p, err: oracles.elliptic_k_agm(p["x"], err),
    description="complete elliptic integral of the first kind, |x| < 1"))
register(Representation(
    "elliptic-e", "E(x)", {"x": Fraction(1, 2), "unsquared": False},
    evaluate=lambda p, mu, stop: functions.elliptic_e_param(p["x"], mu, stop, p["unsquared"]),
    components=_ELLIPTIC_E[0],
    oracle=lambda p, err: oracles.elliptic_e_agm(p["x"], err),
    description="complete elliptic integral of the second kind, |x| < 1"))
register(Representation(
    "exp-laguerre", "exp(-x)", {"x": 1},
    evaluate=lambda p, mu, stop: functions.exp_laguerre_identity(p["x"], mu, stop),
    components=_laguerre_components,
    oracle=_closed(lambda p, prec: gmpy2.exp(-_x(p, prec))),
    description="exp(-x) as a weighted sum of Laguerre polynomials, mu != 0"))
register(Representation(
    "m-constant", "M", {},
    evaluate=lambda p, mu, stop: constants.m_constant_param(mu, stop),
    components=_M[0], oracle=lambda p, err: oracles.m_ref(err),
    description="the constant M = sum H_n (zeta(n+1) - 1)"))


def _digamma_shifted(x, err):
    psi = oracles.digamma_ref(1 + _as_number(x), err / 2)
    g = oracles.gamma_ref(err / 2)
    with working(psi.value.precision):
        return oracles.OracleValue(psi.value + g.value, "digamma + gamma", err)


def _loggamma_shifted(x, err):
    lg = oracles.loggamma_ref(1 + _as_number(x), err / 2)
    g = oracles.gamma_ref(err / 2)
    with working(lg.value.precision):
        return oracles.OracleValue(lg.value + g.value * to_real(x, lg.value.precision),
                                   "log-gamma + gamma*x", err)


def _as_number(x):
    q = as_exact(x)
    return q if q is not None else to_real(x, FACTOR_BITS)
