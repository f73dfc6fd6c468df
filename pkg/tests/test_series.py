from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from penner.errors import BackendError, DomainError, RegularizationError
from penner.exact import LogLinear
from penner.series import LogSeries, TruncatedSeries, genus_kernel

TS = TruncatedSeries
F = Fraction


def test_inverse_and_power():
    s = TS([1, 1], order=6)
    inv = s.inverse()
    assert inv.to_list() == [1, -1, 1, -1, 1, -1, 1]
    sq = TS([1, 4], order=4).power(F(1, 2))
    assert (sq * sq).to_list() == [1, 4, 0, 0, 0]


def test_log_exp_roundtrip():
    s = TS([0, 1, F(1, 3), -2], order=7)
    assert s.exp().log() == s.truncate(7)


def test_dx_integrate():
    s = TS([3, 2, 1], order=5)
    assert s.integrate().dx().truncate(4) == s.truncate(4)


def test_laurent_division():
    x = TS.x(order=5)
    with pytest.raises(Exception):
        TS([1], order=5).div(x)
    q = TS([1], order=5).div(x, allow_laurent=True)
    assert q.val == -1 and q.coeff(-1) == 1


def test_backends_do_not_mix():
    with pytest.raises(BackendError):
        TS([F(1), mpmath.mpf(1)])


def test_log_of_with_valuation():
    s = TS([0, 3, 3], order=5)        # 3x(1+x)
    L = LogSeries.log_of(s)
    assert L.q.coeff(0) == 1
    assert L.p.coeff(0) == LogLinear.log_of(3).simplify()
    assert L.p.coeff(1) == 1 and L.p.coeff(2) == F(-1, 2)
    with pytest.raises(DomainError):
        LogSeries.log_of(TS([-1, 1], order=3))


def test_genus_kernel_plain_and_log():
    # ∫₀ˣ (x−t) log t dt = x²/2 log x − 3x²/4
    g = genus_kernel(LogSeries(TS.zero(order=4), TS.constant(1, order=4)))
    assert g.q.coeff(2) == F(1, 2) and g.p.coeff(2) == F(-3, 4)
    g2 = genus_kernel(TS([1, 1], order=3))           # x²/2 + x³/6
    assert g2.p.coeff(2) == F(1, 2) and g2.p.coeff(3) == F(1, 6)


def test_genus_kernel_singular_terms():
    f = TS([1], order=3, val=-2)
    with pytest.raises(RegularizationError):
        genus_kernel(f)
    g = genus_kernel(f, regularized=True)
    assert g.p.coeff(0) == -1 and g.q.coeff(0) == -1


def test_float_backend_evaluate():
    s = TS([mpmath.mpf(1), mpmath.mpf(2)], order=3)
    assert s.evaluate(mpmath.mpf("0.5")) == 2


rats = st.fractions(min_value=-5, max_value=5, max_denominator=9)


@settings(max_examples=40, deadline=None)
@given(st.lists(rats, min_size=1, max_size=6), st.lists(rats, min_size=1, max_size=6), rats)
def test_division_inverts_multiplication(a, b, c0):
    b = [c0 if c0 != 0 else F(1)] + b[1:]
    A, B = TS(a, order=6), TS(b, order=6)
    assert (A * B).div(B) == A


@settings(max_examples=30, deadline=None)
@given(st.lists(rats, min_size=2, max_size=6), st.fractions(min_value=-3, max_value=3,
                                                               max_denominator=4))
def test_power_law(a, alpha):
    u = TS([F(1)] + a[1:], order=5)
    assert u.power(alpha) * u.power(1 - alpha) == u
