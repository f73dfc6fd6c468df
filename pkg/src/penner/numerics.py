"""Scalar backends and special functions.

Two backends coexist: exact rationals (``fractions.Fraction``) and big floats
(``mpmath.mpf`` at a caller-chosen number of decimal digits).  Helpers here
refuse to mix them silently.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from numbers import Rational

import mpmath
from mpmath import mp

from .errors import BackendError, DomainError, PrecisionError

DEFAULT_PREC = 50

RATIONAL = "rational"
FLOAT = "float"


# ---------------------------------------------------------------- backends

def backend_of(value) -> str:
    """Return ``'rational'`` or ``'float'`` for a scalar."""
    if isinstance(value, bool):
        raise BackendError("booleans are not scalars")
    if isinstance(value, Rational):
        return RATIONAL
    if isinstance(value, (mpmath.mpf, mpmath.mpc, float, complex)):
        return FLOAT
    tag = getattr(value, "backend", None)
    if tag in (RATIONAL, FLOAT):
        return tag
    raise BackendError(f"unsupported scalar type {type(value).__name__}")


def common_backend(*values) -> str:
    """Backend shared by all ``values``; mixing raises :class:`BackendError`."""
    tags = {backend_of(v) for v in values}
    if len(tags) > 1:
        raise BackendError("exact and floating scalars cannot be mixed")
    return tags.pop() if tags else RATIONAL


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, ``"-3"`` or an int/Fraction into a Fraction.

    Decimal notation is rejected so that configs stay bit-exact.
    """
    if isinstance(text, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(text, Rational):
        return Fraction(text)
    if not isinstance(text, str):
        raise DomainError(f"expected a rational string, got {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise DomainError(f"not a rational literal: {text!r}") from None
    if q == 0:
        raise DomainError(f"zero denominator in {text!r}")
    return Fraction(p, q)


def to_mpf(x):
    """Convert an exact or float scalar to an mpf at the current precision."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return mpmath.mpf(x)
    return mpmath.mpf(x)


def to_mpc(x):
    if isinstance(x, Fraction):
        return mpmath.mpc(to_mpf(x))
    return mpmath.mpc(x)


def fmt_scalar(x, digits: int | None = None) -> str:
    """Render a scalar: rationals as ``p/q``, floats with full precision."""
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, mpmath.mpc):
        if x.imag == 0:
            x = x.real
        else:
            return mpmath.nstr(x, digits or mp.dps, strip_zeros=False)
    if isinstance(x, (mpmath.mpf, float)):
        return mpmath.nstr(mpmath.mpf(x), digits or mp.dps, strip_zeros=False,
                           min_fixed=-5, max_fixed=8)
    return str(x)


# ------------------------------------------------------------ log-gamma

def _positive_real(z, name="z"):
    if isinstance(z, (mpmath.mpc, complex)):
        raise DomainError(f"{name} must be real")
    if z <= 0:
        raise DomainError(f"{name} must be positive, got {z}")


def gamma_int(m: int) -> int:
    """Exact Γ(m) = (m−1)! for a positive integer m."""
    if not isinstance(m, int) or m < 1:
        raise DomainError(f"exact Gamma needs a positive integer, got {m!r}")
    return math.factorial(m - 1)


def log_gamma(z, prec: int = DEFAULT_PREC, exact: bool = False):
    """log Γ(z) for real z > 0.

    With ``exact=True`` and integer z the value is log((z−1)!) of an exact
    integer, so only the final logarithm is rounded.
    """
    _positive_real(z)
    with mp.workdps(prec + 10):
        if exact or (isinstance(z, Fraction) and z.denominator == 1) or isinstance(z, int):
            zi = Fraction(z)
            if zi.denominator == 1:
                return +mpmath.log(gamma_int(int(zi)))
            if exact:
                raise DomainError("exact Gamma path needs an integer argument")
        return +mpmath.loggamma(to_mpf(z))


# ---------------------------------------------------------- Bernoulli

_bern_lock = threading.Lock()
_bern: list[Fraction] = [Fraction(1)]  # B_0, B_1, ... (B_1 = -1/2)


def _extend_bernoulli(m: int) -> None:
    with _bern_lock:
        while len(_bern) <= m:
            k = len(_bern)
            acc = Fraction(0)
            c = 1  # binomial(k+1, j)
            for j in range(k):
                acc += c * _bern[j]
                c = c * (k + 1 - j) // (j + 1)
            _bern.append(-acc / (k + 1))


def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n for even n ≥ 2."""
    if not isinstance(n, int) or n < 2 or n % 2:
        raise DomainError(f"bernoulli index must be even and >= 2, got {n!r}")
    if len(_bern) <= n:
        _extend_bernoulli(n)
    return _bern[n]


# ------------------------------------------------------------- ζ'(−1)

_zp_lock = threading.Lock()
_zp_cache: dict[int, mpmath.mpf] = {}


def _alternating_sum(terms, n):
    # Cohen-Rodriguez Villegas-Zagier acceleration of sum_{k>=0} (-1)^k a_k.
    d = (3 + mpmath.sqrt(8)) ** n
    d = (d + 1 / d) / 2
    b = mpmath.mpf(-1)
    c = -d
    s = mpmath.mpf(0)
    for k in range(n):
        c = b - c
        s += c * terms(k)
        b = (k + n) * (k - n) * b / ((k + mpmath.mpf(1) / 2) * (k + 1))
    return s / d


def zeta_prime_minus_one(prec: int = DEFAULT_PREC):
    """ζ′(−1) via the Glaisher–Kinkelin constant.

    log A = (γ + log 2π − 6ζ′(2)/π²)/12 and ζ′(−1) = 1/12 − log A, where
    ζ′(2) is obtained from the accelerated alternating series for η′(2).
    """
    with _zp_lock:
        for p, v in _zp_cache.items():
            if p >= prec:
                with mp.workdps(prec):
                    return +v
    with mp.workdps(prec + 15):
        n = int((prec + 15) / math.log10(3 + math.sqrt(8))) + 5
        eta_p2 = -_alternating_sum(lambda k: mpmath.log(k + 1) / (k + 1) ** 2, n)
        pi2 = mpmath.pi ** 2
        zeta_p2 = 2 * eta_p2 - pi2 / 6 * mpmath.log(2)
        log_a = (mpmath.euler + mpmath.log(2 * mpmath.pi) - 6 * zeta_p2 / pi2) / 12
        value = mpmath.mpf(1) / 12 - log_a
    with _zp_lock:
        _zp_cache[prec] = value
    with mp.workdps(prec):
        return +value


# ------------------------------------------------------------ Barnes G

def barnes_g_int(n: int) -> int:
    """Exact G(n) = Π_{k=0}^{n−2} k! for a positive integer n."""
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"exact Barnes G needs a positive integer, got {n!r}")
    out = 1
    f = 1
    for k in range(1, n - 1):
        f *= k
        out *= f
    return out


def switch_point(prec: int) -> int:
    """Threshold z* above which the asymptotic series is used directly."""
    return max(30, math.ceil((prec + 10) * math.log(10) / (2 * math.pi)) + 1)


def barnes_asymptotic_terms(w, prec: int = DEFAULT_PREC, count: int | None = None):
    """Correction terms B_{2k}/(2k(2k−2)) w^{−(2k−2)}, k = 2, 3, ...

    Without ``count`` the list stops at the smallest term (exclusive of the
    terms that start to grow).
    """
    with mp.workdps(prec + 10):
        w = to_mpf(w)
        out = []
        prev = None
        k = 2
        while True:
            b = bernoulli(2 * k)
            t = to_mpf(b) / (2 * k * (2 * k - 2)) / w ** (2 * k - 2)
            if count is None:
                if prev is not None and abs(t) >= abs(prev):
                    break
                out.append(t)
                if abs(t) < mpmath.mpf(10) ** (-(prec + 10)):
                    break
            else:
                out.append(t)
                if len(out) >= count:
                    break
            prev = t
            k += 1
        return out


def _log_g_asymptotic(z, prec):
    # log G(z) with w = z - 1 via the fully expanded series.
    w = z - 1
    lw = mpmath.log(w)
    head = (w * w * lw / 2 - 3 * w * w / 4 + w * mpmath.log(2 * mpmath.pi) / 2
            - lw / 12 + zeta_prime_minus_one(prec + 10))
    terms = barnes_asymptotic_terms(w, prec)
    if not terms or abs(terms[-1]) > mpmath.mpf(10) ** (-(prec + 5)):
        raise PrecisionError(
            f"asymptotic series for log G at z={mpmath.nstr(z, 8)} stalls above 1e-{prec}")
    return head + mpmath.fsum(terms)


def log_barnes_g(z, prec: int = DEFAULT_PREC, method: str = "auto"):
    """log G(z) for real z > 0.

    Methods
    -------
    auto
        exact product at integers, otherwise recursion + asymptotics.
    exact
        integers only: log of the exact factorial product.
    asymptotic
        the large-z series evaluated directly at z.
    recursion
        climb with G(z+1) = Γ(z)G(z) to well beyond the switch point, then
        use the asymptotic series.
    """
    _positive_real(z)
    is_int = (isinstance(z, int) or (isinstance(z, Fraction) and z.denominator == 1))
    if method == "exact" or (method == "auto" and is_int):
        if not is_int:
            raise DomainError("exact Barnes G path needs an integer argument")
        with mp.workdps(prec + 10):
            return +mpmath.log(barnes_g_int(int(z)))
    if method not in ("auto", "asymptotic", "recursion"):
        raise DomainError(f"unknown method {method!r}")
    with mp.workdps(prec + 15):
        zz = to_mpf(z)
        zs = switch_point(prec)
        if method == "asymptotic":
            if zz - 1 <= 0:
                raise DomainError("asymptotic path needs z > 1")
            return _log_g_asymptotic(zz, prec)
        target = zs + (20 if method == "recursion" else 0)
        m = max(0, math.ceil(target - zz))
        if method == "recursion":
            m = max(m, 10)
        acc = _log_g_asymptotic(zz + m, prec)
        for j in range(m):
            acc -= mpmath.loggamma(zz + j)
        return acc
