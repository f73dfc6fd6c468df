"""Truncated power series in x, log-augmented series and 1/z tails.

A :class:`TruncatedSeries` stores the coefficients of x^val .. x^order and
stands for that polynomial plus an unknown O(x^(order+1)) remainder.  Results
of arithmetic never claim more accuracy than their operands justify.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import mpmath

from .errors import BackendError, DomainError, PoleError, RegularizationError
from .exact import LogLinear
from .numerics import FLOAT, RATIONAL, backend_of, to_mpf

DEFAULT_ORDER = 8


def _scalar_backend(c):
    if isinstance(c, int) and not isinstance(c, bool):
        return None  # integers are neutral
    return backend_of(c)


def _is_zero(c) -> bool:
    return c == 0


def _zero(backend):
    return mpmath.mpf(0) if backend == FLOAT else Fraction(0)


def _one(backend):
    return mpmath.mpf(1) if backend == FLOAT else Fraction(1)


def convert(c, backend):
    """Explicit conversion of a scalar into ``backend``."""
    if backend == FLOAT:
        if isinstance(c, LogLinear):
            return c.value(mpmath.mp.dps)
        if isinstance(c, (mpmath.mpc, complex)):
            return mpmath.mpc(c)
        return to_mpf(c)
    if isinstance(c, (LogLinear, Fraction)):
        return c
    if isinstance(c, Rational):
        return Fraction(c)
    raise BackendError(f"cannot convert {type(c).__name__} to an exact scalar")


class TruncatedSeries:
    """Σ_{j=val}^{order} c_j x^j + O(x^{order+1})."""

    __slots__ = ("coeffs", "val", "backend")

    def __init__(self, coeffs, order=None, val=0, backend=None):
        coeffs = list(coeffs)
        if order is None:
            order = val + len(coeffs) - 1
        n = order - val + 1
        tags = {_scalar_backend(c) for c in coeffs} - {None}
        if backend is not None:
            tags.add(backend)
        if len(tags) > 1:
            raise BackendError("exact and floating coefficients cannot be mixed")
        self.backend = tags.pop() if tags else RATIONAL
        conv = (lambda c: Fraction(c) if isinstance(c, int) else c) if self.backend == RATIONAL \
            else (lambda c: mpmath.mpf(c) if isinstance(c, int) else c)
        coeffs = [conv(c) for c in coeffs[:max(n, 0)]]
        coeffs += [_zero(self.backend)] * (n - len(coeffs))
        self.coeffs = coeffs
        self.val = val

    # ----------------------------------------------------------- basics
    @property
    def order(self) -> int:
        return self.val + len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order=DEFAULT_ORDER, backend=None):
        return cls([c], order=order, backend=backend)

    @classmethod
    def x(cls, order=DEFAULT_ORDER, backend=RATIONAL):
        return cls([0, 1], order=order, backend=backend)

    @classmethod
    def zero(cls, order=DEFAULT_ORDER, backend=RATIONAL):
        return cls([], order=order, backend=backend)

    def coeff(self, j):
        if j > self.order:
            raise DomainError(f"coefficient x^{j} beyond known order {self.order}")
        if j < self.val:
            return _zero(self.backend)
        return self.coeffs[j - self.val]

    __getitem__ = coeff

    def truncate(self, order):
        order = min(order, self.order)
        return TruncatedSeries(self.coeffs[:max(order - self.val + 1, 0)], order=order,
                               val=self.val, backend=self.backend)

    def normalized(self):
        """Strip leading zeros into the valuation."""
        k = 0
        while k < len(self.coeffs) and _is_zero(self.coeffs[k]):
            k += 1
        if k == len(self.coeffs):
            return TruncatedSeries([], order=self.order, val=max(self.val, 0) if self.val < 0
                                   else self.val, backend=self.backend)
        return TruncatedSeries(self.coeffs[k:], order=self.order, val=self.val + k,
                               backend=self.backend)

    def valuation(self):
        """Exponent of the first nonzero coefficient (None when all known ones vanish)."""
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return self.val + i
        return None

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs)

    def shift(self, k: int):
        """Multiply by x^k (k may be negative)."""
        return TruncatedSeries(self.coeffs, order=self.order + k, val=self.val + k,
                               backend=self.backend)

    def with_backend(self, backend):
        if backend == self.backend:
            return self
        return TruncatedSeries([convert(c, backend) for c in self.coeffs], order=self.order,
                               val=self.val, backend=backend)

    def _check(self, other):
        if isinstance(other, TruncatedSeries):
            if other.backend != self.backend and not (other.is_zero() and not other.coeffs):
                raise BackendError("exact and floating series cannot be mixed")
            return other
        tag = _scalar_backend(other)
        if tag is not None and tag != self.backend:
            if not (isinstance(other, LogLinear) and self.backend == RATIONAL):
                raise BackendError("exact and floating scalars cannot be mixed")
        return TruncatedSeries([other], order=self.order, backend=self.backend)

    # ------------------------------------------------------- arithmetic
    def __add__(self, other):
        if not isinstance(other, (TruncatedSeries, Rational, LogLinear, mpmath.mpf, mpmath.mpc)):
            return NotImplemented
        if not isinstance(other, TruncatedSeries):
            if self.order < 0:
                return self
            other = TruncatedSeries([other], order=max(self.order, 0),
                                    backend=self._check(other).backend)
        self._check(other)
        order = min(self.order, other.order)
        val = min(self.val, other.val)
        out = [self._get0(j) + other._get0(j) for j in range(val, order + 1)]
        return TruncatedSeries(out, order=order, val=val, backend=self.backend)

    def _get0(self, j):
        i = j - self.val
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return _zero(self.backend)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], order=self.order, val=self.val,
                               backend=self.backend)

    def __sub__(self, other):
        if not isinstance(other, (TruncatedSeries, Rational, LogLinear, mpmath.mpf, mpmath.mpc)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            val = self.val + other.val
            order = min(self.order + other.val, other.order + self.val)
            n = order - val + 1
            out = [_zero(self.backend)] * max(n, 0)
            a, b = self.coeffs, other.coeffs
            for i, ai in enumerate(a):
                if i >= n or _is_zero(ai):
                    continue
                for j in range(min(len(b), n - i)):
                    out[i + j] += ai * b[j]
            return TruncatedSeries(out, order=order, val=val, backend=self.backend)
        if isinstance(other, (Rational, LogLinear, mpmath.mpf, mpmath.mpc)):
            self._check(other)
            return TruncatedSeries([c * other for c in self.coeffs], order=self.order,
                                   val=self.val, backend=self.backend)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, q):
        """Multiply by a scalar, converting it explicitly to this backend."""
        return self * convert(q, self.backend)

    def inverse(self):
        """1/self for a series with nonzero leading coefficient at x^0."""
        v = self.valuation()
        if v is None:
            raise PoleError("inverse of a series with no nonzero known coefficient")
        if v != 0:
            raise PoleError("inverse needs a nonzero constant term")
        a = self.normalized().coeffs
        n = len(a)
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, n):
            acc = _zero(self.backend)
            for j in range(1, k + 1):
                acc += a[j] * out[k - j]
            out.append(-acc * inv0)
        return TruncatedSeries(out, order=n - 1, backend=self.backend)

    def div(self, other, allow_laurent=False):
        if not isinstance(other, TruncatedSeries):
            self._check(other)
            if _is_zero(other):
                raise ZeroDivisionError("series division by zero scalar")
            if isinstance(other, int):
                other = convert(other, self.backend)
            return self * (1 / other)
        self._check(other)
        vb = other.valuation()
        if vb is None:
            raise PoleError("division by a series with no nonzero known coefficient")
        unit = other.normalized().shift(-vb)
        num = self.normalized().shift(-vb)
        va = num.valuation()
        if not allow_laurent and va is not None and va < 0:
            raise PoleError("quotient has negative powers; factor x explicitly")
        if not allow_laurent and va is None and num.val < 0:
            num = TruncatedSeries([], order=num.order, val=0, backend=num.backend)
        return num * unit.inverse()

    def __truediv__(self, other):
        if not isinstance(other, (TruncatedSeries, Rational, LogLinear, mpmath.mpf, mpmath.mpc)):
            return NotImplemented
        return self.div(other)

    def __rtruediv__(self, other):
        return TruncatedSeries([other], order=self.order - (self.valuation() or 0),
                               backend=self.backend).div(self)

    def __pow__(self, n):
        if isinstance(n, int) and n >= 0:
            if n == 0:
                return TruncatedSeries.constant(_one(self.backend), order=max(self.order, 0),
                                                backend=self.backend)
            out = None
            base = self
            while n:
                if n & 1:
                    out = base if out is None else out * base
                n >>= 1
                if n:
                    base = base * base
            return out
        if isinstance(n, int):
            return (self ** (-n)).inverse()
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            if self.backend != other.backend or self.order != other.order:
                return False
            lo = min(self.val, other.val)
            return all(self._get0(j) == other._get0(j) for j in range(lo, self.order + 1))
        return NotImplemented

    __hash__ = None

    # -------------------------------------------------------- functions
    def power(self, alpha):
        """self**alpha for a unit series (c_0 ≠ 0), alpha rational or float."""
        a = self.normalized()
        if a.val != 0 or not a.coeffs:
            raise DomainError("power needs a nonzero constant term")
        c0 = a.coeffs[0]
        lead = _scalar_pow(c0, alpha, self.backend)
        u = [c / c0 for c in a.coeffs]
        if self.backend == FLOAT:
            alpha_ = to_mpf(alpha) if isinstance(alpha, Fraction) else alpha
        else:
            alpha_ = Fraction(alpha)
        g = [_one(self.backend)]
        for nn in range(1, len(u)):
            acc = _zero(self.backend)
            for k in range(1, nn + 1):
                acc += ((alpha_ + 1) * k - nn) * u[k] * g[nn - k]
            g.append(acc / nn)
        return TruncatedSeries([lead * c for c in g], order=a.order, backend=self.backend)

    def sqrt(self):
        if self.valuation() != 0 or self.coeffs[-self.val] != 1:
            raise DomainError("sqrt needs constant term 1; factor it out first")
        return self.power(Fraction(1, 2))

    def log(self):
        """log of a series with constant term 1."""
        if self.val > 0 or self.coeff(0) != 1:
            raise DomainError("log needs constant term 1; factor it out first")
        if self.val < 0 and any(not _is_zero(self.coeff(j)) for j in range(self.val, 0)):
            raise DomainError("log of a Laurent series")
        s = self.truncate(self.order)
        if s.val < 0:
            s = TruncatedSeries([s.coeff(j) for j in range(0, s.order + 1)], backend=s.backend)
        return (s.dx() * s.inverse().truncate(s.order - 1)).integrate()

    def exp(self):
        if self.valuation() is not None and self.valuation() < 1 and self.coeff(0) != 0:
            raise DomainError("exp needs zero constant term")
        if self.val < 0:
            raise DomainError("exp of a Laurent series")
        n = self.order + 1
        a = [self.coeff(j) for j in range(n)]
        g = [_one(self.backend)]
        for k in range(1, n):
            acc = _zero(self.backend)
            for j in range(1, k + 1):
                acc += j * a[j] * g[k - j]
            g.append(acc / k)
        return TruncatedSeries(g, order=self.order, backend=self.backend)

    def dx(self):
        out = []
        val = self.val - 1
        for i, c in enumerate(self.coeffs):
            e = self.val + i
            out.append(c * e)
        if self.val == 0:
            out = out[1:]
            val = 0
        return TruncatedSeries(out, order=self.order - 1, val=val, backend=self.backend)

    def integrate(self):
        """Antiderivative vanishing at 0 (no x^-1 term allowed)."""
        out = []
        for i, c in enumerate(self.coeffs):
            e = self.val + i
            if e == -1:
                if not _is_zero(c):
                    raise DomainError("cannot integrate x^-1 into a power series")
                out.append(_zero(self.backend))
                continue
            out.append(c / (e + 1))
        if self.val == -1:
            return TruncatedSeries(out[1:], order=self.order + 1, val=1, backend=self.backend)
        return TruncatedSeries(out, order=self.order + 1, val=self.val + 1, backend=self.backend)

    def compose(self, inner):
        """self(inner(x)) for inner with zero constant term."""
        if not isinstance(inner, TruncatedSeries):
            raise TypeError("compose needs a series")
        self._check(inner)
        v = inner.valuation()
        if self.val < 0:
            raise DomainError("compose of a Laurent series")
        if v is not None and v < 1:
            raise DomainError("inner series must have zero constant term")
        order = min(self.order, inner.order) if v is not None else self.order
        acc = TruncatedSeries.constant(self.coeff(self.order), order=order, backend=self.backend)
        for j in range(self.order - 1, -1, -1):
            acc = (acc * inner).truncate(order) + self.coeff(j)
        return acc.truncate(order)

    def evaluate(self, x):
        """Numeric value of the known polynomial part at x."""
        if self.backend == RATIONAL and isinstance(x, (int, Fraction)) and not any(
                isinstance(c, LogLinear) for c in self.coeffs):
            x = Fraction(x)
            return sum((c * x ** (self.val + i) for i, c in enumerate(self.coeffs)), Fraction(0))
        xv = to_mpf(x) if isinstance(x, (int, Fraction)) else x
        return mpmath.fsum(convert(c, FLOAT) * xv ** (self.val + i)
                           for i, c in enumerate(self.coeffs))

    def to_list(self):
        """Coefficients of x^0..x^order (requires val >= 0)."""
        return [self.coeff(j) for j in range(0, self.order + 1)]

    def __repr__(self):
        terms = ", ".join(f"{c}" for c in self.coeffs)
        return f"TruncatedSeries(val={self.val}, order={self.order}, [{terms}])"


def _scalar_pow(c0, alpha, backend):
    if backend == FLOAT:
        return mpmath.power(c0, alpha if not isinstance(alpha, Fraction) else to_mpf(alpha))
    alpha = Fraction(alpha)
    if isinstance(c0, LogLinear):
        raise DomainError("power of a transcendental constant")
    c0 = Fraction(c0)
    if alpha.denominator == 1:
        return c0 ** int(alpha)
    q = alpha.denominator
    if c0 < 0 and q % 2 == 0:
        raise DomainError("even root of a negative constant term")
    num = _int_root(abs(c0.numerator), q)
    den = _int_root(c0.denominator, q)
    if num is None or den is None:
        raise DomainError(f"{c0}^({alpha}) is irrational; factor it out or use floats")
    root = Fraction(num, den) * (-1 if c0 < 0 else 1)
    return root ** alpha.numerator


def _int_root(n, q):
    r = round(n ** (1.0 / q)) if n < 2 ** 1000 else None
    if r is None:
        lo, hi = 0, 1 << (n.bit_length() // q + 1)
        while lo < hi:
            mid = (lo + hi) // 2
            if mid ** q < n:
                lo = mid + 1
            else:
                hi = mid
        r = lo
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** q == n:
            return cand
    return None


# ------------------------------------------------------------- LogSeries

class LogSeries:
    """p(x) + q(x)·log x with p, q truncated series."""

    __slots__ = ("p", "q")

    def __init__(self, p, q=None):
        if q is None:
            q = TruncatedSeries.zero(order=p.order, backend=p.backend)
        if p.backend != q.backend:
            raise BackendError("exact and floating components cannot be mixed")
        self.p = p
        self.q = q

    @property
    def backend(self):
        return self.p.backend

    @property
    def order(self):
        return min(self.p.order, self.q.order)

    @classmethod
    def log_of(cls, s: TruncatedSeries) -> "LogSeries":
        """log s for s = c·x^v·(1 + O(x)) with c > 0."""
        v = s.valuation()
        if v is None:
            raise DomainError("log of a series with no nonzero coefficient")
        unit = s.normalized().shift(-v)
        c = unit.coeffs[0]
        if s.backend == RATIONAL:
            if isinstance(c, LogLinear) or c <= 0:
                raise DomainError("log needs a positive rational leading coefficient")
            logc = LogLinear.log_of(c)
            logc = logc.simplify()
        else:
            if c <= 0:
                raise DomainError("log needs a positive leading coefficient")
            logc = mpmath.log(c)
        p = (unit * (1 / c)).log() + logc
        q = TruncatedSeries.constant(v, order=p.order, backend=s.backend)
        return cls(p, q)

    def __add__(self, other):
        if isinstance(other, LogSeries):
            return LogSeries(self.p + other.p, self.q + other.q)
        if isinstance(other, TruncatedSeries):
            return LogSeries(self.p + other, self.q)
        if isinstance(other, (Rational, LogLinear, mpmath.mpf)):
            return LogSeries(self.p + other, self.q)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return LogSeries(-self.p, -self.q)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LogSeries):
            if not (other.q.is_zero() or self.q.is_zero()):
                raise DomainError("product would contain log^2 x")
            if other.q.is_zero():
                return LogSeries(self.p * other.p, self.q * other.p)
            return LogSeries(other.p * self.p, other.q * self.p)
        if isinstance(other, (TruncatedSeries, Rational, LogLinear, mpmath.mpf)):
            return LogSeries(self.p * other, self.q * other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c):
        return LogSeries(self.p.scale(c), self.q.scale(c))

    def dx(self):
        """d/dx (p + q log x) = p' + q/x + q' log x (may be Laurent)."""
        return LogSeries(self.p.dx() + self.q.shift(-1), self.q.dx())

    def truncate(self, order):
        return LogSeries(self.p.truncate(order), self.q.truncate(order))

    def evaluate(self, x):
        xv = to_mpf(x) if isinstance(x, (int, Fraction)) else x
        return convert(self.p.evaluate(x), FLOAT) + convert(self.q.evaluate(x), FLOAT) * mpmath.log(xv)

    def __eq__(self, other):
        if isinstance(other, LogSeries):
            return self.p == other.p and self.q == other.q
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"LogSeries(p={self.p!r}, q={self.q!r})"


def genus_kernel(f, regularized: bool = False) -> LogSeries:
    """g(x) = ∫₀ˣ (x−t) f(t) dt applied termwise to a LogSeries.

    Plain terms t^j (j ≥ 0) give x^{j+2}/((j+1)(j+2)); t^j log t gives
    x^{j+2} log x/((j+1)(j+2)) − x^{j+2}(2j+3)/((j+1)²(j+2)²).  Terms with
    j < 0 diverge at t = 0: strict mode raises, regularized mode takes the
    Hadamard finite part (t⁻¹ → x log x − x, t⁻² → −1 − log x).
    """
    if isinstance(f, TruncatedSeries):
        f = LogSeries(f)
    backend = f.backend
    order = f.order + 2
    P = [_zero(backend)] * (order + 1)
    Q = [_zero(backend)] * (order + 1)

    def put(arr, e, c):
        if 0 <= e <= order:
            arr[e] += c
        elif e < 0:
            raise RegularizationError("finite part produced a negative power beyond support")

    for j in range(f.p.val, f.p.order + 1):
        c = f.p.coeff(j)
        if _is_zero(c):
            continue
        if j >= 0:
            put(P, j + 2, c / ((j + 1) * (j + 2)))
        elif not regularized:
            raise RegularizationError(
                f"t^{j} term is not integrable at t = 0; enable regularized mode")
        elif j == -1:
            put(Q, 1, c)
            put(P, 1, -c)
        elif j == -2:
            put(P, 0, -c)
            put(Q, 0, -c)
        else:
            raise RegularizationError(f"t^{j} finite part would need negative powers of x")
    for j in range(f.q.val, f.q.order + 1):
        c = f.q.coeff(j)
        if _is_zero(c):
            continue
        if j < 0:
            raise RegularizationError(f"t^{j} log t term is not integrable at t = 0")
        d = (j + 1) * (j + 2)
        put(Q, j + 2, c / d)
        put(P, j + 2, -c * (2 * j + 3) / (d * d))
    return LogSeries(TruncatedSeries(P, order=order, backend=backend),
                     TruncatedSeries(Q, order=order, backend=backend))


# ------------------------------------------------------------ LaurentTail

class LaurentTail:
    """Coefficients t_0..t_M of z^0, z^-1, ..., z^-M around z = ∞."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = list(coeffs)

    @property
    def M(self):
        return len(self.coeffs) - 1

    def __add__(self, other):
        m = min(self.M, other.M)
        return LaurentTail([self.coeffs[i] + other.coeffs[i] for i in range(m + 1)])

    def __mul__(self, other):
        if isinstance(other, LaurentTail):
            m = min(self.M, other.M)
            out = []
            for k in range(m + 1):
                acc = self.coeffs[0] * other.coeffs[k]
                for i in range(1, k + 1):
                    acc = acc + self.coeffs[i] * other.coeffs[k - i]
                out.append(acc)
            return LaurentTail(out)
        return LaurentTail([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def residue_against(self, poly):
        """Res_{z=∞-circle} of (Σ_p poly[p] z^p)·tail = Σ_p poly[p]·t_{p+1}."""
        acc = None
        for p, c in enumerate(poly):
            if c == 0:
                continue
            if p + 1 > self.M:
                raise DomainError(f"tail known to z^-{self.M}; residue needs z^-{p + 1}")
            term = c * self.coeffs[p + 1]
            acc = term if acc is None else acc + term
        return 0 if acc is None else acc
