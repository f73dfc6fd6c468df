"""Exact symbolic scalars.

``ExactProduct``
    a rational coefficient times a finite product of primes, π, Γ(f) and
    G(f) (0 < f < 1) raised to rational powers.  Closed under
    multiplication, division and rational powers, and canonical, so
    equality is exact.  Partition functions of the solvable models live
    here.

``LogLinear``
    rational + Σ rational·log(prime).  Genus coefficients such as
    −3/4 − log(3)/2 live here.
"""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering

import mpmath
from mpmath import mp

from .errors import DomainError
from .numerics import DEFAULT_PREC, RATIONAL, log_barnes_g, parse_rational, to_mpf


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer by trial division."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _rational_factors(q: Fraction) -> dict[int, int]:
    f = factorize(q.numerator)
    for p, e in factorize(q.denominator).items():
        f[p] = f.get(p, 0) - e
    return f


def _floor_frac(a: Fraction) -> tuple[int, Fraction]:
    m = a.numerator // a.denominator
    return m, a - m


def _sym_sort_key(k):
    return (0, k, "") if isinstance(k, int) else (1, 0, k)


class ExactProduct:
    """c · Π sym^e with canonical normalization (see module docstring)."""

    __slots__ = ("coeff", "syms")
    backend = RATIONAL

    def __init__(self, coeff=1, syms=None):
        coeff = Fraction(coeff)
        clean: dict = {}
        for k, e in (syms or {}).items():
            e = Fraction(e)
            if e == 0:
                continue
            if isinstance(k, int):
                whole, frac = _floor_frac(e)
                coeff *= Fraction(k) ** whole
                if frac:
                    clean[k] = clean.get(k, 0) + frac
            else:
                clean[k] = clean.get(k, 0) + e
        self.coeff = coeff
        self.syms = {k: v for k, v in clean.items() if v != 0}

    # constructors -------------------------------------------------
    @classmethod
    def rational(cls, q) -> "ExactProduct":
        return cls(Fraction(q))

    @classmethod
    def power(cls, base, e) -> "ExactProduct":
        """base**e for positive rational base and rational exponent."""
        base, e = Fraction(base), Fraction(e)
        if base <= 0:
            raise DomainError("power base must be positive")
        if e.denominator == 1:
            return cls(base ** int(e))
        return cls(1, {p: k * e for p, k in _rational_factors(base).items()})

    @classmethod
    def pi_power(cls, e) -> "ExactProduct":
        return cls(1, {"pi": Fraction(e)})

    @classmethod
    def gamma(cls, a) -> "ExactProduct":
        """Γ(a) for rational a > 0, reduced to Γ(frac(a)) by Pochhammer."""
        a = Fraction(a)
        if a <= 0:
            raise DomainError(f"Gamma at nonpositive argument {a}")
        m, f = _floor_frac(a)
        if f == 0:
            c = Fraction(1)
            for j in range(1, m):
                c *= j
            return cls(c)
        c = Fraction(1)
        for j in range(m):
            c *= f + j
        return cls(c, {"pi": Fraction(1, 2)} if f == Fraction(1, 2) else {f"Gamma({f})": 1})

    @classmethod
    def barnes_g(cls, a) -> "ExactProduct":
        """G(a) for rational a > 0 via G(f+m) = G(f) Π_{j<m} Γ(f+j)."""
        a = Fraction(a)
        if a <= 0:
            raise DomainError(f"Barnes G at nonpositive argument {a}")
        m, f = _floor_frac(a)
        if f == 0:
            out = cls(1)
            for j in range(1, m):
                out = out * cls.gamma(j)
            return out
        out = cls(1, {f"G({f})": 1})
        for j in range(m):
            out = out * cls.gamma(f + j)
        return out

    # arithmetic ---------------------------------------------------
    def _combine(self, other, sign):
        if not isinstance(other, ExactProduct):
            other = ExactProduct(Fraction(other))
        syms = dict(self.syms)
        for k, e in other.syms.items():
            syms[k] = syms.get(k, 0) + sign * e
        coeff = self.coeff * other.coeff if sign > 0 else self.coeff / other.coeff
        return ExactProduct(coeff, syms)

    def __mul__(self, other):
        if isinstance(other, (ExactProduct, int, Fraction)):
            return self._combine(other, 1)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (ExactProduct, int, Fraction)):
            if not isinstance(other, ExactProduct):
                other = ExactProduct(other)
            if other.coeff == 0:
                raise ZeroDivisionError("division by zero product")
            return self._combine(other, -1)
        return NotImplemented

    def __rtruediv__(self, other):
        return ExactProduct(Fraction(other)) / self

    def __pow__(self, e):
        e = Fraction(e)
        if e.denominator == 1:
            n = int(e)
            return ExactProduct(self.coeff ** n, {k: v * n for k, v in self.syms.items()})
        if self.coeff <= 0:
            raise DomainError("fractional power of a nonpositive product")
        out = ExactProduct.power(self.coeff, e)
        return out * ExactProduct(1, {k: v * e for k, v in self.syms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactProduct(other)
        if not isinstance(other, ExactProduct):
            return NotImplemented
        return self.coeff == other.coeff and self.syms == other.syms

    def __hash__(self):
        return hash((self.coeff, tuple(sorted(self.syms.items(), key=lambda kv: _sym_sort_key(kv[0])))))

    @property
    def is_rational(self) -> bool:
        return not self.syms

    # evaluation ---------------------------------------------------
    def log(self, prec: int = DEFAULT_PREC):
        """Real log of |value| as an mpf."""
        if self.coeff == 0:
            raise DomainError("log of zero")
        with mp.workdps(prec + 10):
            acc = mpmath.log(abs(to_mpf(self.coeff)))
            for k, e in self.syms.items():
                acc += to_mpf(e) * _log_symbol(k, prec)
            return acc

    def value(self, prec: int = DEFAULT_PREC):
        with mp.workdps(prec + 10):
            if self.coeff == 0:
                return mpmath.mpf(0)
            v = mpmath.exp(self.log(prec))
            return -v if self.coeff < 0 else v

    def __repr__(self):
        return f"ExactProduct({self})"

    def __str__(self):
        parts = [] if self.coeff == 1 and self.syms else [_frac_str(self.coeff)]
        for k in sorted(self.syms, key=_sym_sort_key):
            e = self.syms[k]
            parts.append(str(k) if e == 1 else f"{k}^({_frac_str(e)})")
        return "*".join(parts)


def _log_symbol(k, prec):
    if isinstance(k, int):
        return mpmath.log(k)
    if k == "pi":
        return mpmath.log(mpmath.pi)
    name, arg = k[:-1].split("(")
    f = parse_rational(arg)
    if name == "Gamma":
        return mpmath.loggamma(to_mpf(f))
    return log_barnes_g(f, prec + 10)


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@total_ordering
class LogLinear:
    """rat + Σ_p c_p·log p with rational rat, c_p and primes p."""

    __slots__ = ("rat", "logs")
    backend = RATIONAL

    def __init__(self, rat=0, logs=None):
        self.rat = Fraction(rat)
        self.logs = {p: Fraction(c) for p, c in (logs or {}).items() if c != 0}

    @classmethod
    def log_of(cls, q) -> "LogLinear":
        """log q for a positive rational q."""
        q = Fraction(q)
        if q <= 0:
            raise DomainError(f"log of nonpositive {q}")
        return cls(0, {p: Fraction(e) for p, e in _rational_factors(q).items()})

    @staticmethod
    def lift(x) -> "LogLinear":
        return x if isinstance(x, LogLinear) else LogLinear(Fraction(x))

    @property
    def is_rational(self) -> bool:
        return not self.logs

    def simplify(self):
        """Plain Fraction when no logarithm survives."""
        return self.rat if not self.logs else self

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return LogLinear(self.rat + other, self.logs)
        if not isinstance(other, LogLinear):
            return NotImplemented
        logs = dict(self.logs)
        for p, c in other.logs.items():
            logs[p] = logs.get(p, 0) + c
        return LogLinear(self.rat + other.rat, logs)

    __radd__ = __add__

    def __neg__(self):
        return LogLinear(-self.rat, {p: -c for p, c in self.logs.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, LogLinear)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LogLinear):
            if other.is_rational:
                other = other.rat
            elif self.is_rational:
                return other * self.rat
            else:
                raise DomainError("product of two transcendental log constants")
        if isinstance(other, (int, Fraction)):
            return LogLinear(self.rat * other, {p: c * other for p, c in self.logs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LogLinear):
            if not other.is_rational:
                raise DomainError("division by a transcendental log constant")
            other = other.rat
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if self.is_rational:
            return Fraction(other) / self.rat
        raise DomainError("division by a transcendental log constant")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational and self.rat == other
        if not isinstance(other, LogLinear):
            return NotImplemented
        return self.rat == other.rat and self.logs == other.logs

    def __lt__(self, other):
        return self.value() < LogLinear.lift(other).value()

    def __hash__(self):
        return hash((self.rat, tuple(sorted(self.logs.items()))))

    def __bool__(self):
        return self.rat != 0 or bool(self.logs)

    def value(self, prec: int = DEFAULT_PREC):
        with mp.workdps(prec + 10):
            return to_mpf(self.rat) + mpmath.fsum(to_mpf(c) * mpmath.log(p)
                                                  for p, c in self.logs.items())

    def __float__(self):
        return float(self.value(20))

    def __repr__(self):
        return f"LogLinear({self})"

    def __str__(self):
        parts = []
        if self.rat or not self.logs:
            parts.append(_frac_str(self.rat))
        for p in sorted(self.logs):
            c = self.logs[p]
            term = f"log({p})" if c == 1 else f"{_frac_str(c)}*log({p})"
            if parts and not term.startswith("-"):
                term = "+" + term
            parts.append(term)
        return "".join(parts)
