from fractions import Fraction

import gmpy2
import pytest
from conftest import FROZEN_ERROR, err, frozen

from paramseries import oracles
from paramseries.errors import DomainError
from paramseries.exactmath import working

TIGHT = Fraction(1, 10**45)


def within_claim(result, name):
    return err(result.value, frozen(name)) <= float(result.claimed_error) + FROZEN_ERROR


@pytest.mark.parametrize("s, name", [(2, "zeta2"), (3, "zeta3"), (5.5, "zeta5.5"), (20, "zeta20")])
def test_zeta_ref_matches_frozen(s, name):
    r = oracles.zeta_ref(s)
    assert within_claim(r, name)
    assert r.claimed_error <= oracles.DEFAULT_ERROR


def test_zeta_ref_direct_sum_crosscheck_at_two():
    # sum_{n<=N} n**-2 + 1/N - 1/(2N**2) has error below 1/(6 N**3)
    n = 10**4
    with working(200):
        direct = sum(gmpy2.mpfr(1) / (k * k) for k in range(1, n + 1))
        direct += gmpy2.mpfr(1) / n - gmpy2.mpfr(1) / (2 * n * n)
    assert err(direct, oracles.zeta_ref(2).value) < 1 / (6 * n**3)


def test_zeta_ref_large_s():
    z = oracles.zeta_ref(40).value
    with working(z.precision):
        assert 0 < z - 1 < gmpy2.mul_2exp(gmpy2.mpfr(1), -39)


def test_zeta_ref_domain():
    with pytest.raises(DomainError):
        oracles.zeta_ref(1)


def test_pi_ref():
    r = oracles.pi_ref()
    assert within_claim(r, "pi")
    assert f"{r.value:.20f}".startswith("3.14159265358")
    with working(r.value.precision):
        assert abs(r.value - gmpy2.const_pi()) <= gmpy2.mul_2exp(gmpy2.mpfr(1), -r.value.precision + 2) + r.claimed_error


def test_arctan_of_zero_limit():
    value, tail = oracles.arctan_inverse(10**30, 64)
    assert float(value) == pytest.approx(1e-30)


def test_gamma_ref():
    r = oracles.gamma_ref()
    assert within_claim(r, "gamma")


def test_gamma_ref_two_n_values_agree():
    a = oracles.gamma_ref(Fraction(1, 10**30), n=10**4)
    b = oracles.gamma_ref(Fraction(1, 10**30), n=10**5)
    assert err(a.value, b.value) <= float(a.claimed_error + b.claimed_error)


def test_gamma_ref_raises_cutoff_for_tight_targets():
    r = oracles.gamma_ref(Fraction(1, 2**330))
    assert r.claimed_error <= Fraction(1, 2**330)
    assert within_claim(r, "gamma")
    with pytest.raises(DomainError):
        oracles.gamma_ref(Fraction(1, 2**330), n=10**3)


def test_harmonic():
    assert oracles.harmonic(1) == 1
    assert oracles.harmonic(4) == Fraction(25, 12)
    assert oracles.harmonic(1000).denominator > 1


def test_digamma_ref_values():
    g = oracles.gamma_ref().value
    with working(200):
        assert err(oracles.digamma_ref(1).value, -g) < 1e-39
        assert err(oracles.digamma_ref(2).value, 1 - g) < 1e-39
    assert within_claim(oracles.digamma_ref(Fraction(1, 4)), "psi(1/4)")
    assert within_claim(oracles.digamma_ref(Fraction(3, 2)), "psi(3/2)")


def test_digamma_reflection_gives_pi():
    a = oracles.digamma_ref(Fraction(3, 4))
    b = oracles.digamma_ref(Fraction(1, 4))
    with working(200):
        assert err(a.value - b.value, oracles.pi_ref().value) < 1e-38


@pytest.mark.parametrize("x, s, name", [(Fraction(1, 2), 2, "Li2(1/2)"), (Fraction(-1, 2), 3, "Li3(-1/2)"),
                                        (-1, 2, "Li2(-1)")])
def test_polylog_ref(x, s, name):
    assert within_claim(oracles.polylog_ref(x, s), name)


def test_polylog_ref_at_one_is_zeta():
    assert within_claim(oracles.polylog_ref(1, 2), "zeta2")


def test_polylog_ref_at_zero():
    assert oracles.polylog_ref(0, 2).value == 0


def test_lerch_ref():
    assert within_claim(oracles.lerch_ref(Fraction(2, 5), Fraction(3, 2), Fraction(5, 2)),
                        "lerch(x=0.4,a=1.5,s=2.5)")
    assert within_claim(oracles.lerch_ref(Fraction(-2, 5), Fraction(1, 2), Fraction(3, 2)),
                        "lerch(x=-0.4,a=0.5,s=1.5)")
    assert within_claim(oracles.lerch_ref(1, 2, 3), "hurwitz(3,2)")
    eta2 = oracles.lerch_ref(-1, 1, 2).value
    with working(200):
        assert err(eta2, frozen("zeta2") / 2) < 1e-40


def test_lerch_ref_at_zero_argument():
    with working(200):
        assert err(oracles.lerch_ref(0, 2, 3).value, gmpy2.mpfr(1) / 8) < 1e-45


def test_elliptic_agm():
    assert within_claim(oracles.elliptic_k_agm(Fraction(1, 2)), "K(0.5)")
    assert within_claim(oracles.elliptic_e_agm(Fraction(1, 2)), "E(0.5)")
    assert within_claim(oracles.elliptic_k_agm(Fraction(9, 10)), "K(0.9)")
    assert within_claim(oracles.elliptic_e_agm(Fraction(9, 10)), "E(0.9)")
    with working(200):
        half_pi = gmpy2.const_pi() / 2
    assert err(oracles.elliptic_k_agm(0).value, half_pi) < 1e-40
    assert err(oracles.elliptic_e_agm(0).value, half_pi) < 1e-40


def test_legendre_relation():
    x = Fraction(3, 5)
    xp = Fraction(4, 5)
    k, e = oracles.elliptic_k_agm(x).value, oracles.elliptic_e_agm(x).value
    kp, ep = oracles.elliptic_k_agm(xp).value, oracles.elliptic_e_agm(xp).value
    with working(200):
        lhs = e * kp + ep * k - k * kp
        assert err(lhs, gmpy2.const_pi() / 2) < 1e-20


def test_m_ref():
    r = oracles.m_ref()
    assert within_claim(r, "M")
    assert f"{r.value:.20f}".startswith("1.257746")


def test_m_ref_first_term():
    # H_1 (zeta(2) - 1) is the leading term; the rest is positive
    with working(200):
        assert oracles.m_ref().value > frozen("zeta2") - 1


def test_loggamma_ref():
    assert within_claim(oracles.loggamma_ref(Fraction(3, 2)), "lngamma(3/2)")
    assert within_claim(oracles.loggamma_ref(Fraction(7, 3)), "lngamma(7/3)")
    assert err(oracles.loggamma_ref(2).value, 0) < 1e-40


@pytest.mark.parametrize("fn, args", [
    (oracles.zeta_ref, (3,)),
    (oracles.pi_ref, ()),
    (oracles.digamma_ref, (Fraction(1, 3),)),
    (oracles.elliptic_k_agm, (Fraction(7, 10),)),
    (oracles.m_ref, ()),
])
def test_tighter_request_stays_within_claim(fn, args):
    loose = fn(*args, Fraction(1, 10**30))
    tight = fn(*args, TIGHT)
    assert err(loose.value, tight.value) <= float(loose.claimed_error + tight.claimed_error)
