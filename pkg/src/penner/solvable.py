"""Closed forms for the exactly solvable models.

Every result carries r_n, s_n, log Z_n (mpf, computed in log space), the
partition function as an :class:`ExactProduct` and, where known, the
resolvent values at the log points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import DomainError
from .exact import ExactProduct
from .numerics import DEFAULT_PREC, FLOAT, RATIONAL, log_barnes_g, log_gamma, to_mpf

SOLVABLE = ("gaussian", "linear_penner", "gaussian_penner", "double_penner")


@dataclass(frozen=True)
class SolvableResult:
    n: int
    N: Fraction
    r: object
    s: object
    logZ: object
    Z: ExactProduct
    extras: dict = field(default_factory=dict)


def _pos(name, v):
    v = Fraction(v)
    if v <= 0:
        raise DomainError(f"{name} must be positive, got {v}")
    return v


def _n(n):
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    return n


def _out(backend, v):
    if backend == RATIONAL:
        return v
    if backend == FLOAT:
        return to_mpf(v)
    raise DomainError(f"unknown backend {backend!r}")


def _lg(z, prec):
    return log_barnes_g(Fraction(z), prec)


# ------------------------------------------------------------ gaussian

def gaussian_exact(n: int, N, backend: str = RATIONAL, prec: int = DEFAULT_PREC):
    """W = z²/2 on ℝ: r_n = n/N, Z_n = (2π)^{n/2} N^{−n²/2} G(n+1)."""
    n, N = _n(n), _pos("N", N)
    Z = (ExactProduct.power(2, Fraction(n, 2)) * ExactProduct.pi_power(Fraction(n, 2))
         * ExactProduct.power(N, Fraction(-n * n, 2)) * ExactProduct.barnes_g(n + 1))
    with mp.workdps(prec + 10):
        logZ = (n * mpmath.log(2 * mpmath.pi) / 2 - n * n * mpmath.log(to_mpf(N)) / 2
                + _lg(n + 1, prec))
    return SolvableResult(n, N, _out(backend, Fraction(n) / N), _out(backend, Fraction(0)),
                          logZ, Z)


# ------------------------------------------------------ linear Penner

def linear_penner_exact(n: int, N, backend: str = RATIONAL, prec: int = DEFAULT_PREC):
    """W = z − log z on [0, ∞)."""
    n, N = _n(n), _pos("N", N)
    r = Fraction(n) / N + Fraction(n * n) / (N * N)
    s = 1 + (2 * n + 1) / N
    Z = (ExactProduct.barnes_g(n + 1) * ExactProduct.barnes_g(N + n + 1)
         / (ExactProduct.power(N, n * (N + n)) * ExactProduct.barnes_g(N + 1)))
    with mp.workdps(prec + 10):
        logZ = (_lg(n + 1, prec) + _lg(N + n + 1, prec) - _lg(N + 1, prec)
                - to_mpf(n * (N + n)) * mpmath.log(to_mpf(N)))
    extras = {"T0": _out(backend, 1 + 2 * n / N), "R0": _out(backend, Fraction(-1))}
    return SolvableResult(n, N, _out(backend, r), _out(backend, s), logZ, Z, extras)


# ---------------------------------------------------- Z2 gaussian Penner

def _gp_args(n, N):
    e = 1 if n % 2 == 0 else -1
    num = [Fraction(2 * n + 3 + e, 4), Fraction(2 * n + 5 - e, 4),
           (2 * n + 3 - e + 2 * N) / 4, (2 * n + 5 + e + 2 * N) / 4]
    den = [(N + 1) / 2, (N + 3) / 2]
    return num, den


def gaussian_penner_exact(n: int, N, backend: str = RATIONAL, prec: int = DEFAULT_PREC):
    """W = z²/2 − ½ log z² on ℝ; Z_n from the merged four-G expression."""
    n, N = _n(n), _pos("N", N)
    r = Fraction(n) / N + Fraction(1 - (-1) ** n, 2)
    num, den = _gp_args(n, N)
    Z = ExactProduct.power(2 / N, Fraction(n) * (n + N) / 2)
    for a in num:
        Z = Z * ExactProduct.barnes_g(a)
    for a in den:
        Z = Z / ExactProduct.barnes_g(a)
    with mp.workdps(prec + 10):
        logZ = to_mpf(Fraction(n) * (n + N) / 2) * mpmath.log(2 / to_mpf(N))
        logZ += mpmath.fsum(_lg(a, prec) for a in num) - mpmath.fsum(_lg(a, prec) for a in den)
    extras = {"T0": _out(backend, Fraction((-1) ** n)), "R0": _out(backend, Fraction(0))}
    return SolvableResult(n, N, _out(backend, r), _out(backend, Fraction(0)), logZ, Z, extras)


def gaussian_penner_parity_Z(n: int, N) -> ExactProduct:
    """Separate odd (n = 2k+1) and even (n = 2k) closed forms."""
    n, N = _n(n), _pos("N", N)
    b = (N + 1) / 2
    k = n // 2
    G, Gm = ExactProduct.barnes_g, ExactProduct.gamma
    if n % 2:
        return (ExactProduct.power(2 / N, (2 * k + 1) * (k + b)) * Gm(k + 1) * G(k + 1) ** 2
                * G(b + k + 1) ** 2 * Gm(b) / G(b + 1) ** 2)
    return (ExactProduct.power(2 / N, k * (2 * k + N)) * G(k + 1) ** 2 * G(b + k + 1) ** 2
            * Gm(b) / (G(b + 1) ** 2 * Gm(b + k)))


def gaussian_penner_parity_logZ(n: int, N, prec: int = DEFAULT_PREC):
    """log Z_n through the odd/even forms, evaluated numerically."""
    n, N = _n(n), _pos("N", N)
    b = (N + 1) / 2
    k = n // 2
    with mp.workdps(prec + 10):
        l2 = mpmath.log(2 / to_mpf(N))
        if n % 2:
            return (to_mpf((2 * k + 1) * (k + b)) * l2 + log_gamma(k + 1, prec)
                    + 2 * _lg(k + 1, prec) + 2 * _lg(b + k + 1, prec) + log_gamma(b, prec)
                    - 2 * _lg(b + 1, prec))
        return (to_mpf(k * (2 * k + N)) * l2 + 2 * _lg(k + 1, prec) + 2 * _lg(b + k + 1, prec)
                + log_gamma(b, prec) - 2 * _lg(b + 1, prec) - log_gamma(b + k, prec))


# -------------------------------------------------------- double Penner

def double_penner_exact(n: int, alpha0, alpha1, backend: str = RATIONAL,
                        prec: int = DEFAULT_PREC):
    """W = −μ₀ log z − μ₁ log(1 − z) on [0, 1], in terms of αᵢ = μᵢN."""
    n = _n(n)
    a0, a1 = _pos("alpha0", alpha0), _pos("alpha1", alpha1)
    S = a0 + a1
    m = 2 * n + S
    r = n * (n + a0) * (n + a1) * (n + S) / (m * m * (m - 1) * (m + 1)) if n else Fraction(0)
    s = (2 * n * n + 2 * n * (S + 1) + S * (a0 + 1)) / (m * (m + 2))
    extras = {
        "R0": -(2 * n + 1 + S) / a0,
        # positive sign: forced by the second string equation μ₀R_n(0) + μ₁R_n(1) = 0
        "R1": (2 * n + 1 + S) / a1,
        "T0": (2 * n * n + (2 * n + a0) * S) / (a0 * m),
        "T1": (2 * n * n + (2 * n + a1) * S) / (a1 * m),
    }
    G = ExactProduct.barnes_g
    Z = (G(n + 1) * G(n + a0 + 1) * G(n + a1 + 1) * G(n + S + 1)
         / (G(a0 + 1) * G(a1 + 1) * G(2 * n + S + 1)))
    with mp.workdps(prec + 10):
        logZ = (_lg(n + 1, prec) + _lg(n + a0 + 1, prec) + _lg(n + a1 + 1, prec)
                + _lg(n + S + 1, prec) - _lg(a0 + 1, prec) - _lg(a1 + 1, prec)
                - _lg(2 * n + S + 1, prec))
    extras = {k: _out(backend, v) for k, v in extras.items()}
    return SolvableResult(n, a0, _out(backend, r), _out(backend, s), logZ, Z, extras)


def double_penner_logZ_duplication(n: int, alpha0, alpha1, prec: int = DEFAULT_PREC):
    """Independent path: Z_n as a product of Γ's, halving the arguments of
    the denominator factors Γ(S+n+1+j) with Legendre duplication."""
    n = _n(n)
    a0, a1 = _pos("alpha0", alpha0), _pos("alpha1", alpha1)
    S = a0 + a1
    with mp.workdps(prec + 10):
        acc = mpmath.mpf(0)
        half_log_pi = mpmath.log(mpmath.pi) / 2
        for j in range(n):
            acc += log_gamma(a0 + 1 + j, prec) + log_gamma(a1 + 1 + j, prec)
            acc += log_gamma(j + 1, prec) if j else 0
            w = (S + n + 1 + j) / 2
            # Γ(2w) = 2^{2w−1} Γ(w) Γ(w + 1/2) / √π
            acc -= (to_mpf(2 * w - 1) * mpmath.log(2) + log_gamma(w, prec)
                    + log_gamma(w + Fraction(1, 2), prec) - half_log_pi)
        return acc


# --------------------------------------------------------------- tables

def exact_row(model: str, n: int, N=None, alpha0=None, alpha1=None,
              backend: str = RATIONAL, prec: int = DEFAULT_PREC) -> SolvableResult:
    if model == "gaussian":
        return gaussian_exact(n, N, backend, prec)
    if model == "linear_penner":
        return linear_penner_exact(n, N, backend, prec)
    if model == "gaussian_penner":
        return gaussian_penner_exact(n, N, backend, prec)
    if model == "double_penner":
        return double_penner_exact(n, alpha0, alpha1, backend, prec)
    raise DomainError(f"{model!r} is not an exactly solvable preset ({', '.join(SOLVABLE)})")
