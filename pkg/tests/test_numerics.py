from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from penner.errors import BackendError, DomainError
from penner.numerics import (barnes_g_int, bernoulli, common_backend, fmt_scalar, log_barnes_g,
                             log_gamma, parse_rational, to_mpf, zeta_prime_minus_one)


def test_parse_rational_forms():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational(" -2 ") == -2
    assert parse_rational(Fraction(1, 3)) == Fraction(1, 3)
    for bad in ("0.5", "1/0", True, 1.5):
        with pytest.raises(DomainError):
            parse_rational(bad)


def test_backend_mixing_is_refused():
    assert common_backend(Fraction(1), 2) == "rational"
    assert common_backend(mpmath.mpf(1)) == "float"
    with pytest.raises(BackendError):
        common_backend(Fraction(1), mpmath.mpf(1))


def test_fmt_scalar():
    assert fmt_scalar(Fraction(-3, 4)) == "-3/4"
    assert fmt_scalar(5) == "5"
    assert fmt_scalar(mpmath.mpf("0.5"), 5) == "0.50000"


def test_bernoulli_numbers():
    assert [bernoulli(k) for k in (2, 4, 6, 8)] == [Fraction(1, 6), Fraction(-1, 30),
                                                    Fraction(1, 42), Fraction(-1, 30)]
    assert bernoulli(20) == Fraction(-174611, 330)
    with pytest.raises(DomainError):
        bernoulli(3)


def test_zeta_prime_minus_one():
    with mpmath.workdps(60):
        ref = mpmath.zeta(-1, derivative=1)
        assert abs(zeta_prime_minus_one(50) - ref) < mpmath.mpf(10) ** -48


def test_log_gamma_integer_path_is_exact():
    with mpmath.workdps(60):
        assert abs(log_gamma(30, 50) - mpmath.log(mpmath.factorial(29))) < mpmath.mpf(10) ** -50
        assert abs(log_gamma(Fraction(7, 2), 50) - mpmath.loggamma(3.5)) < mpmath.mpf(10) ** -14
    with pytest.raises(DomainError):
        log_gamma(0)


def test_barnes_g_integers():
    # G(1) = G(2) = 1, G(n) = Π_{k<n-1} k!
    assert [barnes_g_int(n) for n in range(1, 7)] == [1, 1, 1, 2, 12, 288]
    with pytest.raises(DomainError):
        barnes_g_int(0)


@pytest.mark.parametrize("z", [Fraction(1, 2), Fraction(7, 3), Fraction(21, 2), Fraction(45)])
def test_log_barnes_g_matches_mpmath(z):
    with mpmath.workdps(60):
        ref = mpmath.log(mpmath.barnesg(to_mpf(z)))
        assert abs(log_barnes_g(z, 50) - ref) < mpmath.mpf(10) ** -45


@pytest.mark.parametrize("z", [30, 50, 100])
def test_barnes_recursion_vs_asymptotic(z):
    with mpmath.workdps(60):
        d = log_barnes_g(z, 50, "recursion") - log_barnes_g(z, 50, "asymptotic")
        assert abs(d) < mpmath.mpf(10) ** -40


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10), max_value=40, max_denominator=50))
def test_barnes_functional_equation(z):
    # G(z+1) = Γ(z) G(z)
    with mpmath.workdps(40):
        lhs = log_barnes_g(z + 1, 30)
        rhs = log_gamma(z, 30) + log_barnes_g(z, 30)
        assert abs(lhs - rhs) < mpmath.mpf(10) ** -25 * (1 + abs(lhs))
