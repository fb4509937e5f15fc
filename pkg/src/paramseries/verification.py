"""Self-checks: each identity the library relies on, compared against an
independent reference, plus the two coefficient/prefix adjudications."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import gmpy2

from . import oracles
from .exactmath import to_real, working
from .specialfn import constants, functions, registry, sources
from .transform import StoppingRule, exact_partial_sums, transform_eval

THIRDS = (Fraction(1, 3), Fraction(1, 2), 1)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    finding: str = ""


def _err(a, b) -> float:
    with working(max(a.precision, b.precision)):
        return float(abs(a - b))


def _stop(tol, max_terms=1000, bits=256):
    return StoppingRule(tolerance=tol, max_terms=max_terms, target_bits=bits)


def _worst(pairs):
    worst = 0.0
    for a, b in pairs:
        worst = max(worst, _err(a, b))
    return worst


ELEMENTARY = {
    "geometric": (sources.geometric, lambda t: 1 / (1 - t)),
    "log1p": (sources.log_one_plus, gmpy2.log1p),
    "expneg": (sources.exp_neg, lambda t: gmpy2.exp(-t)),
}
BINOMIAL_EXPONENTS = (Fraction(1, 2), Fraction(-1, 2), 3)


def elementary_case(name: str):
    """(source, closed form) for an elementary source name such as 'binomial[1/2]'."""
    if name.startswith("binomial["):
        beta = Fraction(name[9:-1])
        return sources.binomial_beta(beta), lambda t: (1 + t) ** to_real(beta, t.precision)
    return ELEMENTARY[name][0](), ELEMENTARY[name][1]


def elementary_samples(count: int, seed: int = 20240601):
    """Random (source name, x, mu) with mu in [-1/3, 1] and |x| <= 0.8 radius.

    exp(-x) has no finite radius; it is sampled on |x| <= 2.
    """
    rng = random.Random(seed)
    names = ["geometric", "log1p", "expneg", "binomial"]
    out = []
    for i in range(count):
        name = names[i % len(names)]
        if name == "binomial":
            name = f"binomial[{BINOMIAL_EXPONENTS[(i // 4) % 3]}]"
        mu = Fraction(rng.randint(-1000, 3000), 3000)
        half_width = 2 if name == "expneg" else Fraction(4, 5)
        x = Fraction(rng.randint(-1000, 1000), 1000) * half_width
        out.append((name, x, mu))
    return out


def check_elementary(count: int = 50, tol=Fraction(1, 10**20)) -> CheckResult:
    worst = 0.0
    for name, x, mu in elementary_samples(count):
        src, closed = elementary_case(name)
        report = transform_eval(src, x, mu, _stop(tol, 400))
        with working(report.value.precision):
            worst = max(worst, _err(report.value, closed(to_real(mu * x, report.value.precision))))
    return CheckResult("elementary-identities", worst <= float(tol),
                       f"{count} samples, worst error {worst:.2e}")


def check_mu_zero_exact(n_max: int = 50) -> CheckResult:
    ok = True
    for name, x in (("geometric", Fraction(1, 3)), ("log1p", Fraction(-2, 5)), ("expneg", Fraction(7, 4))):
        src = ELEMENTARY[name][0]()
        sums = exact_partial_sums(src, x, 0, n_max + 1, paramfree=True)
        taylor = list(itertools.accumulate(src.coeff(k) * x**k for k in range(n_max + 1)))
        ok &= sums == taylor
    return CheckResult("mu-zero-exact", ok, f"rational partial sums through n = {n_max}")


def check_hasse_consistency(tol=Fraction(1, 10**20)) -> CheckResult:
    worst = 0.0
    for s in (2, 3, Fraction(11, 2)):
        stop = _stop(tol / 10)
        z = functions.zeta_hasse(s, 1, stop).value
        phi = functions.lerch_param(1, 1, s, stop).value
        with working(phi.precision):
            via = phi / (1 - 2 ** (1 - to_real(s, phi.precision)))
        worst = max(worst, _err(z, via))
    return CheckResult("zeta-lerch-consistency", worst <= float(tol), f"worst {worst:.2e}")


def check_zeta(tol=Fraction(1, 10**25)) -> CheckResult:
    worst = _worst((functions.zeta_hasse(s, 1, _stop(tol / 10)).value, oracles.zeta_ref(s).value)
                   for s in (2, 3, Fraction(11, 2)))
    return CheckResult("zeta-vs-reference", worst <= float(tol), f"worst {worst:.2e}")


def check_lerch(tol=Fraction(1, 10**12)) -> CheckResult:
    worst = 0.0
    for x, a, s in itertools.product((Fraction(-2, 5), 0, Fraction(2, 5), 1),
                                     (Fraction(1, 2), 1, Fraction(5, 2)), (Fraction(3, 2), 2, 4)):
        value = functions.lerch_param(x, a, s, _stop(tol / 100)).value
        worst = max(worst, _err(value, oracles.lerch_ref(-x, a, s).value))
    return CheckResult("lerch-grid", worst <= float(tol), f"36 points, worst {worst:.2e}")


def check_polylog(tol=Fraction(1, 10**12)) -> CheckResult:
    worst = 0.0
    for x, s in itertools.product((Fraction(1, 2), Fraction(-1, 2), 1, -1), (2, 3)):
        value = functions.polylog_param(x, s, 1, _stop(tol / 100)).value
        worst = max(worst, _err(value, oracles.polylog_ref(x, s).value))
    return CheckResult("polylog-grid", worst <= float(tol), f"worst {worst:.2e}")


MU_INDEPENDENCE = (
    ("lerch", {"x": Fraction(2, 5), "a": Fraction(3, 2), "s": Fraction(5, 2)}),
    ("polylog", {"x": Fraction(1, 2), "s": 2}),
    ("polylog", {"x": 1, "s": 3}),
    ("pi-amore", {}),
    ("elliptic-k", {"x": Fraction(1, 2)}),
    ("elliptic-e", {"x": Fraction(1, 2)}),
    ("digamma", {"x": Fraction(1, 2)}),
    ("loggamma", {"x": Fraction(1, 2)}),
    ("gamma-loggamma", {}),
    ("gamma-zeta-tail", {}),
    ("m-constant", {}),
)


def check_mu_independence(tol=Fraction(1, 10**10)) -> CheckResult:
    worst = 0.0
    for rep_id, params in MU_INDEPENDENCE:
        rep = registry.get(rep_id)
        values = [rep.run(params, mu, _stop(tol / 100)).value for mu in THIRDS]
        worst = max(worst, _worst(itertools.combinations(values, 2)))
    return CheckResult("mu-independence", worst <= float(tol),
                       f"{len(MU_INDEPENDENCE)} representations at mu in {{1/3, 1/2, 1}}, "
                       f"worst spread {worst:.2e}")


def check_pi(tol=Fraction(1, 10**10)) -> CheckResult:
    pi = oracles.pi_ref().value
    amore = [constants.amore_pi(mu, _stop(tol / 100)).value for mu in THIRDS]
    dig = constants.pi_via_digamma(1, _stop(tol / 100)).value
    worst = _worst([(v, pi) for v in amore] + [(dig, pi)])
    return CheckResult("pi-representations", worst <= float(tol), f"worst {worst:.2e}")


def check_laguerre(tol=Fraction(1, 10**10)) -> CheckResult:
    worst = 0.0
    for x, mu in itertools.product((Fraction(1, 2), 1, 2), (Fraction(1, 2), 1, 2)):
        value = functions.exp_laguerre_identity(x, mu, _stop(tol / 100)).value
        with working(value.precision):
            worst = max(worst, _err(value, gmpy2.exp(-to_real(x, value.precision))))
    return CheckResult("laguerre-exp", worst <= float(tol), f"9 points, worst {worst:.2e}")


def check_gamma(tol=Fraction(1, 10**12)) -> CheckResult:
    g = oracles.gamma_ref().value
    vals = [constants.euler_gamma_param(mu, _stop(tol / 100)).value for mu in (Fraction(1, 3), 1)]
    vals.append(constants.alzer_koumandos_gamma(1, _stop(tol / 100)).value)
    vals.append(constants.euler_gamma_accel(1, constants.PrefixVariant.CONSTANT, _stop(tol / 100)).value)
    worst = _worst((v, g) for v in vals)
    return CheckResult("gamma-representations", worst <= float(tol), f"worst {worst:.2e}")


def check_gamma_prefix(tol=Fraction(1, 10**10)) -> CheckResult:
    """At mu = 1 exactly one of the shifted and mu-dependent prefixes must match."""
    g = oracles.gamma_ref().value
    stop = _stop(tol / 100)
    errs = {}
    for variant in (constants.PrefixVariant.SHIFTED, constants.PrefixVariant.MU_DEPENDENT):
        errs[variant.value] = _err(constants.euler_gamma_accel(1, variant, stop).value, g)
    matching = [v for v, e in errs.items() if e <= float(tol)]
    half = {v.value: _err(constants.euler_gamma_accel(Fraction(1, 2), v, stop).value, g)
            for v in constants.PrefixVariant}
    finding = (f"at mu = 1 the matching prefix is {', '.join(matching) or 'none'}; "
               f"at mu = 1/2 errors are "
               + ", ".join(f"{k} {v:.1e}" for k, v in half.items()))
    return CheckResult("gamma-prefix-adjudication", len(matching) == 1,
                       ", ".join(f"{k} {v:.2e}" for k, v in errs.items()), finding)


def truncate6(value) -> str:
    """First six decimals of a positive real, without rounding."""
    text = f"{value:.20f}"
    return text[: text.index(".") + 7]


def check_m(tol=Fraction(1, 10**8)) -> CheckResult:
    ref = oracles.m_ref().value
    stop = _stop(Fraction(1, 10**12))
    vals = [("m-constant", constants.m_constant_param(1, stop).value)]
    vals += [(r.representation_id, r.value) for r in constants.m_constant_alternatives(stop)]
    worst = _worst(itertools.combinations([v for _, v in vals] + [ref], 2))
    truncated = {truncate6(v) for _, v in vals}
    finding = (f"M = {ref:.15f}...; six decimals truncate to {', '.join(sorted(truncated))} "
               f"and round to {ref:.6f}")
    return CheckResult("m-representations", worst <= float(tol) and truncated == {"1.257746"},
                       f"{len(vals)} series, worst pairwise {worst:.2e}", finding)


def check_elliptic(tol=Fraction(1, 10**12), gap=Fraction(1, 10**3)) -> CheckResult:
    worst = 0.0
    for x in (Fraction(1, 10), Fraction(3, 10), Fraction(1, 2), Fraction(7, 10), Fraction(9, 10)):
        k = functions.elliptic_k_param(x, 1, _stop(tol / 100)).value
        e = functions.elliptic_e_param(x, 1, _stop(tol / 100)).value
        worst = max(worst, _err(k, oracles.elliptic_k_agm(x).value),
                    _err(e, oracles.elliptic_e_agm(x).value))
    half = Fraction(1, 2)
    unsq = _err(functions.elliptic_k_param(half, 1, _stop(tol), unsquared=True).value,
                oracles.elliptic_k_agm(half).value)
    finding = (f"squared central binomial coefficients match the AGM values (worst {worst:.1e}); "
               f"the unsquared form misses K(1/2) by {unsq:.3e}")
    return CheckResult("elliptic-coefficient-adjudication", worst <= float(tol) and unsq > float(gap),
                       f"worst {worst:.2e}, unsquared gap {unsq:.2e}", finding)


def check_binomial_identity(n_max: int = 200) -> CheckResult:
    bad = [n for n in range(n_max + 1) if constants.binomial_identity_check(n) != Fraction(n, n + 1)]
    return CheckResult("binomial-identity", not bad,
                       f"n = 0..{n_max}" + (f", failures at {bad[:5]}" if bad else ""))


def check_zeta_bounds(n_max: int = 64) -> CheckResult:
    bad = [n for n in range(1, n_max + 1) if not constants.zeta_bounds_check(n)]
    return CheckResult("zeta-bounds", not bad,
                       f"n = 1..{n_max}" + (f", failures at {bad[:5]}" if bad else ""))


CHECKS: dict[str, Callable[..., CheckResult]] = {
    "elementary-identities": check_elementary,
    "mu-zero-exact": check_mu_zero_exact,
    "zeta-lerch-consistency": check_hasse_consistency,
    "zeta-vs-reference": check_zeta,
    "lerch-grid": check_lerch,
    "polylog-grid": check_polylog,
    "mu-independence": check_mu_independence,
    "pi-representations": check_pi,
    "laguerre-exp": check_laguerre,
    "gamma-representations": check_gamma,
    "gamma-prefix-adjudication": check_gamma_prefix,
    "m-representations": check_m,
    "elliptic-coefficient-adjudication": check_elliptic,
    "binomial-identity": check_binomial_identity,
    "zeta-bounds": check_zeta_bounds,
}

# checks whose size is set by --n-max
SIZED = {"binomial-identity", "zeta-bounds", "mu-zero-exact"}


def run_checks(only=None, n_max: int | None = None) -> list[CheckResult]:
    names = list(only) if only else list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
    results = []
    for name in names:
        if n_max is not None and name in SIZED:
            results.append(CHECKS[name](n_max))
        else:
            results.append(CHECKS[name]())
    return results


def flip_digit(s: int, digit: int = 8) -> Fraction:
    """Delta that changes the given decimal digit of zeta(s) by one."""
    value = oracles.zeta_ref(s).value
    d = int(gmpy2.floor(value * 10**digit)) % 10
    return Fraction(1 if d < 9 else -1, 10**digit)
