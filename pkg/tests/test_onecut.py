from fractions import Fraction

import mpmath
import pytest

from penner.errors import (CriticalityError, DegeneracyError, RegularizationError,
                           UnsupportedFormError, ValidationError)
from penner.exact import LogLinear
from penner.model import Potential, preset
from penner.onecut import (critical_points, f_gaussian, fit_linear_term, flin_double_penner,
                           flin_linear_penner, gaussian_decomposition, genus_free_energy,
                           parity_defects, perturbative_coeffs, planar_residuals, planar_seed,
                           planar_series, planar_solve_numeric)
from penner.series import TruncatedSeries
from penner.solvable import double_penner_exact, gaussian_exact, linear_penner_exact

F = Fraction
L3 = LogLinear.log_of(3)


@pytest.fixture(scope="module")
def cubic():
    return perturbative_coeffs(preset("cubic_penner"), order=4, k_max=2)


def test_critical_points_and_seed():
    cps = critical_points(preset("cubic_penner"))
    assert cps == [(1, 3)]
    assert planar_seed(preset("cubic_penner")) == 1
    with pytest.raises(ValidationError):
        planar_seed(preset("gaussian_penner"))      # two minima ±1


def test_cubic_planar_series():
    rho0, sigma0 = planar_series(preset("cubic_penner"), 4)
    assert rho0.to_list() == [0, F(1, 3), F(-1, 9), F(-4, 81), F(8, 81)]
    assert sigma0.to_list()[:4] == [1, 0, F(2, 9), F(-4, 81)]


def test_cubic_perturbative(cubic):
    assert cubic.rho[1].to_list()[:4] == [0, F(-1, 27), F(23, 243), F(128, 729)]
    assert cubic.sigma[2].to_list()[:4] == [F(1, 9), F(-2, 81), F(-52, 81), F(968, 2187)]
    assert cubic.jacobian_det.coeff(0) == -36


def test_cubic_free_energy(cubic):
    F0, F1 = cubic.genus[0], cubic.genus[1]
    assert F0.q.coeff(2) == F(1, 2)
    assert F0.p.coeff(2) == LogLinear(F(-3, 4), {3: F(-1, 2)})
    assert F0.p.coeff(3) == F(-1, 18)
    assert F1.q.coeff(0) == F(-1, 12)
    assert [F1.p.coeff(j) for j in range(4)] == [(L3 * F(1, 12)).simplify(), F(1, 36),
                                                 F(-25, 648), F(7, 324)]


def test_structure_theorem(cubic):
    # j range 1..2k−1; leading coefficients are the new unknowns plus lower-order terms
    for a in cubic.ansatz:
        assert a.stray == ()
    zero = TruncatedSeries.zero(order=cubic.order)
    o = cubic.order
    get = lambda d: d.get(1, zero).truncate(o)  # noqa: E731
    rt, sg = cubic.rho_tilde, cubic.sigma
    a1, a2 = cubic.ansatz[:2]
    assert get(a1.beta) == sg[1]
    assert get(a1.xi) == rt[1].scale(2)
    assert get(a1.alpha).truncate(o - 1) == (rt[1].scale(2) + rt[0].dx()).truncate(o - 1)
    lower = (rt[0] * sg[0].dx()).scale(-2)
    assert get(a1.gamma).truncate(o - 1) == ((rt[0] * sg[1]).scale(4) + lower).truncate(o - 1)
    assert get(a2.beta) == sg[2]
    assert get(a2.xi) == rt[2].scale(2)
    assert get(a2.gamma) == (rt[0] * sg[2]).scale(4).truncate(o)
    assert not (get(a2.alpha) - rt[2].scale(2)).is_zero()


def test_parity(cubic):
    for _, _, d in parity_defects(cubic.sigma, cubic.rho_tilde):
        assert d.truncate(cubic.order - 2).is_zero()


def test_linear_penner_is_exact():
    e = perturbative_coeffs(preset("linear_penner"), order=5, k_max=2)
    assert e.rho[0].to_list() == [0, 1, 1, 0, 0, 0]
    assert e.sigma[0].to_list() == [1, 2, 0, 0, 0, 0]
    assert e.sigma[1].to_list() == [1, 0, 0, 0, 0, 0]
    assert all(s.is_zero() for s in e.sigma[2:]) and all(r.is_zero() for r in e.rho[1:])


def test_gaussian_free_energy():
    e = perturbative_coeffs(preset("gaussian"), order=3, k_max=2)
    F0, F1, F2 = e.genus
    assert F0.q.coeff(2) == F(1, 2) and F0.p.coeff(2) == F(-3, 4)
    assert F1.q.coeff(0) == F(-1, 12) and F1.p.is_zero()
    assert F2.p.coeff(-2) == F(-1, 240)


def test_double_penner_rho1():
    e = perturbative_coeffs(preset("double_penner"), order=5, k_max=1)
    # ρ₁ = ρ₀/(2x+2)² for μ₀ = μ₁ = 1
    lhs = e.rho[1]
    rhs = e.rho[0].div(TruncatedSeries([2, 2], order=7) ** 2)
    assert lhs.truncate(5) == rhs.truncate(5)


@pytest.mark.parametrize("name", ["gaussian", "linear_penner", "cubic_penner", "double_penner"])
@pytest.mark.parametrize("x", [F(1, 10), F(1, 2), F(1)])
def test_planar_residuals(name, x):
    p = preset(name)
    st = planar_solve_numeric(p, x)
    r = planar_residuals(p, x, st.sigma0, st.rho0)
    assert max(r) < mpmath.mpf(10) ** -12
    assert st.jacobian_det != 0


def test_planar_numeric_linear_penner():
    st = planar_solve_numeric(preset("linear_penner"), F(1, 2))
    assert abs(st.sigma0 - 2) < 1e-25 and abs(st.rho0 - mpmath.mpf(3) / 4) < 1e-25


def test_cubic_planar_closed_form():
    # σ₀³ root of the planar quartic-in-σ relation at x = 0.05
    st = planar_solve_numeric(preset("cubic_penner"), F(1, 20))
    assert abs(st.sigma0 - mpmath.mpf("1.000548390689160016886")) < 1e-14


def test_degenerate_minimum():
    p = Potential((0, 0, 0, F(1, 4)), (), "real_line")
    with pytest.raises((DegeneracyError, CriticalityError)):
        perturbative_coeffs(p, order=3, k_max=1, seed=0)


def test_strict_free_energy_needs_positive_rho():
    e = perturbative_coeffs(preset("linear_penner"), order=3, k_max=1)
    e.rho[0] = e.rho[0].scale(-1)
    with pytest.raises(RegularizationError):
        genus_free_energy(e)


def test_f_gaussian_examples():
    with mpmath.workdps(40):
        v = f_gaussian(mpmath.mpf("0.1"), 1, 1, prec=30)
        assert abs(v - (-75 - mpmath.mpf(1) / 24000)) < 1e-25
        assert abs(f_gaussian(mpmath.mpf("0.3"), 1, 0) + mpmath.mpf(3) / 4 / mpmath.mpf("0.09")) < 1e-12


def test_f_gaussian_against_exact():
    eps, x = mpmath.mpf(1) / 20, mpmath.mpf(1) / 2
    exact = gaussian_exact(10, 20, prec=40).logZ
    with mpmath.workdps(40):
        for k in (1, 2):
            approx = f_gaussian(eps, x, k, full=True, prec=30)
            from penner.numerics import bernoulli, to_mpf
            nxt = abs(to_mpf(bernoulli(2 * k + 4)) * eps ** (2 * k + 2)
                      / ((2 * k + 2) * (2 * k + 4) * x ** (2 * k + 2)))
            assert abs(exact - approx) < 2 * nxt


def test_decomposition_linear_penner():
    d = gaussian_decomposition([(1, 0), (1, 1)])
    assert len(d.terms) == 2
    assert d.rem2 == (F(3, 4), F(1), F(0))
    with mpmath.workdps(40):
        e, x = mpmath.mpf("0.05"), mpmath.mpf("0.7")
        direct = f_gaussian(e, x, 2) + f_gaussian(e, x + 1, 2) + (x + mpmath.mpf(3) / 4) / e ** 2
        assert abs(d.evaluate(e, x, 2) - direct) < 1e-25


def test_decomposition_gaussian_and_errors():
    d = gaussian_decomposition([(1, 0)])
    assert len(d.terms) == 1 and d.rem2 == (0, 0, 0) and d.rem_const == 0
    with pytest.raises(UnsupportedFormError):
        gaussian_decomposition([(1, 2, 3)])
    with pytest.raises(UnsupportedFormError):
        gaussian_decomposition([(1, -1)])


def test_decomposition_double_penner_numerator_factor():
    mu0 = F(2)
    d = gaussian_decomposition([(1, mu0)])
    t = d.terms[0]
    assert (t.a, t.b, t.c) == (1, mu0, 1)
    assert d.rem2[1] != 0          # x-linear remainder from the shifted argument


def test_linear_penner_flin_matches_exact():
    N = 40
    with mpmath.workdps(50):
        eps = mpmath.mpf(1) / N
        for n in (10, 20, 30):
            x = mpmath.mpf(n) / N
            d = gaussian_decomposition([(1, 0), (1, 1)])
            total = d.evaluate(eps, x, 3, prec=40) + flin_linear_penner(eps, x, 3, prec=40)
            exact = linear_penner_exact(n, N, prec=40).logZ
            assert abs(total - exact) < mpmath.mpf(10) ** -9


def test_double_penner_flin_matches_exact():
    N, mu0, mu1 = 20, F(1), F(1)
    with mpmath.workdps(50):
        eps = mpmath.mpf(1) / N
        for n in (8, 14):
            x = F(n, N)
            d = gaussian_decomposition([(1, 0), (1, mu0), (1, mu1), (1, mu0 + mu1)],
                                       eps_blocks=[(2, mu0 + mu1)])
            total = d.evaluate(eps, x, 3, prec=40) + flin_double_penner(eps, x, mu0, mu1, 3, 40)
            exact = double_penner_exact(n, mu0 * N, mu1 * N, prec=40).logZ
            assert abs(total - exact) < mpmath.mpf(10) ** -7


def test_fit_linear_term_recovers_known_flin():
    N = 60
    e = perturbative_coeffs(preset("linear_penner"), order=10, k_max=2)
    c0, c1, res = fit_linear_term(lambda n: linear_penner_exact(n, N, prec=30).logZ,
                                  e.genus, N, range(10, 31, 5), prec=30)
    with mpmath.workdps(40):
        eps = mpmath.mpf(1) / N
        assert abs(c1 - (mpmath.log(2 * mpmath.pi) / eps - 1 / eps ** 2)) < 1e-2
        assert res < 1e-3
