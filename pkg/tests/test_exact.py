from fractions import Fraction

import mpmath
import pytest

from penner.errors import DomainError
from penner.exact import ExactProduct, LogLinear, factorize

EP = ExactProduct


def test_factorize():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(1) == {}
    with pytest.raises(DomainError):
        factorize(0)


def test_gamma_half_squared_is_pi():
    assert EP.gamma(Fraction(1, 2)) ** 2 == EP.pi_power(1)
    assert EP.gamma(Fraction(5, 2)) == EP(Fraction(3, 4), {"pi": Fraction(1, 2)})


def test_power_normalization():
    # 8^(1/2) = 2 * 2^(1/2), canonical form absorbs whole powers
    assert EP.power(8, Fraction(1, 2)) == EP(2, {2: Fraction(1, 2)})
    assert EP.power(Fraction(1, 4), Fraction(1, 2)) == EP.rational(Fraction(1, 2))
    with pytest.raises(DomainError):
        EP.power(-2, Fraction(1, 2))


def test_barnes_g_recursion_symbolic():
    a = Fraction(7, 3)
    assert EP.barnes_g(a + 1) == EP.gamma(a) * EP.barnes_g(a)
    assert EP.barnes_g(5) == EP.rational(12)


def test_numeric_value():
    v = (EP.barnes_g(Fraction(5, 2)) / EP.gamma(Fraction(1, 3))).value(30)
    with mpmath.workdps(40):
        ref = mpmath.barnesg(2.5) / mpmath.gamma(mpmath.mpf(1) / 3)
        assert abs(v - ref) < mpmath.mpf(10) ** -28


def test_str_is_stable():
    assert str(EP.gamma(Fraction(3, 2))) == "1/2*pi^(1/2)"


def test_loglinear_arithmetic():
    a = LogLinear.log_of(Fraction(12))        # 2 log 2 + log 3
    b = LogLinear.log_of(Fraction(3, 4))      # log 3 − 2 log 2
    s = a + b
    assert s == LogLinear(0, {3: 2})
    assert (a - LogLinear.log_of(12)).simplify() == 0
    with mpmath.workdps(30):
        assert abs((a * Fraction(1, 2) + 1).value(25) - (1 + mpmath.log(12) / 2)) < 1e-24
    assert str(LogLinear(Fraction(-3, 4), {3: Fraction(-1, 2)})) == "-3/4-1/2*log(3)"
