from fractions import Fraction

import mpmath
import pytest

from penner.errors import IntegrabilityError, ProximityError, UnsupportedFormError
from penner.model import Potential, preset
from penner.oracle import (compute_moments, exact_resolvents_at, identity_residual_table,
                           log_partition, off_contour_points, partition_function,
                           recurrence_table, resolvents, string_residuals)

F = Fraction


def test_gaussian_recurrence_exact():
    rt = recurrence_table(preset("gaussian"), F(4), 6)
    assert list(rt.r[1:]) == [F(n, 4) for n in range(1, 7)]
    assert set(rt.s) == {0}


def test_float_matches_rational():
    p = preset("linear_penner")
    a = recurrence_table(p, F(3), 6)
    with mpmath.workdps(40):
        b = recurrence_table(p, F(3), 6, "float", 30)
        for x, y in zip(a.r[1:], b.r[1:]):
            assert abs(mpmath.mpf(x.numerator) / x.denominator - y) < mpmath.mpf(10) ** -28


def test_quadrature_moments_match_closed_form():
    p = preset("cubic_penner")
    # no closed form for the cubic weight: compare two working precisions instead
    with mpmath.workdps(40):
        m1 = compute_moments(p, F(2), 6, "float", 30)
        m2 = compute_moments(p, F(2), 6, "float", 40)
        for a, b in zip(m1.m, m2.m):
            assert abs(a - b) < mpmath.mpf(10) ** -28 * abs(b)
    lp = preset("linear_penner")
    with mpmath.workdps(40):
        q = compute_moments(lp, F(2), 5, "float", 30, method="quadrature")
        c = compute_moments(lp, F(2), 5, "float", 30, method="closed")
        for a, b in zip(q.m, c.m):
            assert abs(a - b) < mpmath.mpf(10) ** -28 * abs(b)


def test_rational_backend_needs_classical_weight():
    with pytest.raises(UnsupportedFormError):
        compute_moments(preset("cubic_penner"), F(1), 4)


def test_partition_function_and_log():
    rt = recurrence_table(preset("linear_penner"), F(1), 4)
    Z2 = partition_function(rt, 2)
    assert Z2 == 2
    with mpmath.workdps(30):
        assert abs(log_partition(rt, 2, 20) - mpmath.log(2)) < 1e-20


def test_nonintegrable_weight():
    p = Potential((1,), ((F(-2), 0),), "half_line")
    with pytest.raises(IntegrabilityError):
        compute_moments(p, F(1), 3)


@pytest.mark.parametrize("name", ["gaussian", "linear_penner", "double_penner"])
def test_string_equations_exact(name):
    p = preset(name)
    rt = recurrence_table(p, F(2), 8)
    for n in range(1, 6):
        assert string_residuals(rt, p, F(2), n) == (0, 0)


def test_identities_and_two_paths():
    p = preset("cubic_penner")
    with mpmath.workdps(60):
        rt = recurrence_table(p, F(1), 8, "float", 50)
        for z in off_contour_points(p)[:2]:
            R, T = resolvents(rt, p, F(1), z, 6, "quadrature", 50)
            R2, T2 = resolvents(rt, p, F(1), z, 6, "tridiagonal", 50)
            r1, r2 = identity_residual_table(R, T, rt, z, 6)
            assert r1 < mpmath.mpf(10) ** -35 and r2 < mpmath.mpf(10) ** -35
            assert max(abs(a - b) for a, b in zip(R + T, R2 + T2)) < mpmath.mpf(10) ** -35


def test_z2_symmetry_of_resolvents():
    # T_n(−z) = T_n(z), R_n(−z) = −R_n(z)
    p = preset("gaussian_penner")
    with mpmath.workdps(40):
        rt = recurrence_table(p, F(4), 6, "float", 30)
        z = mpmath.mpc(1, 2)
        R, T = resolvents(rt, p, F(4), z, 4, "quadrature", 30)
        Rm, Tm = resolvents(rt, p, F(4), -z, 4, "quadrature", 30)
        for n in range(5):
            assert abs(R[n] + Rm[n]) < 1e-25 and abs(T[n] - Tm[n]) < 1e-25


def test_contour_proximity():
    p = preset("gaussian")
    rt = recurrence_table(p, F(1), 4, "float", 20)
    with pytest.raises(ProximityError):
        resolvents(rt, p, F(1), mpmath.mpc(1, 0), 2, "quadrature", 20)


def test_exact_endpoint_values_linear_penner():
    # R_n(0) = −1, T_n(0) = 1 + 2n/N for W = z − log z
    p = preset("linear_penner")
    rt = recurrence_table(p, F(1), 5)
    R, T = exact_resolvents_at(rt, p, F(1), 0, 4)
    assert R == [-1] * 5
    assert T[:5] == [1 + 2 * n for n in range(5)]
