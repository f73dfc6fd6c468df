"""One-cut continuum limit: planar system, perturbative recursion, genus
free energies and the decomposition into gaussian contributions.

Resolvent coefficients are kept symbolically as Σ c(x)·Z^e·w^j with
Z = z − σ₀(x), w = (Z² − 4ρ₀)^{−1/2} and e ∈ {0, 1}; the relation
Z² = w^{−2} + 4ρ₀ keeps this form canonical.  The string functional
S[f] = Res_∞[W₀′ f] + Σ μᵢ f(qᵢ) is linear over functions of x, so it only
has to be known on the monomials Z^e w^j: at infinity through the 1/z
expansion of w, at the log points by substitution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import (BackendError, ConsistencyError, ConvergenceError, CriticalityError,
                     DegeneracyError, DomainError, PrecisionError, RegimeError,
                     RegularizationError, UnsupportedFormError, ValidationError)
from .exact import LogLinear
from .model import CONTOUR_ENDS, Potential
from .numerics import (DEFAULT_PREC, FLOAT, RATIONAL, bernoulli, to_mpf,
                       zeta_prime_minus_one)
from .series import LogSeries, TruncatedSeries, convert, genus_kernel

CRITICAL_DET = mpmath.mpf("1e-8")
MAX_NEWTON = 50


# ================================================================ scalars

class _Ops:
    """Coefficient arithmetic: truncated series in x, or plain mpf numbers."""

    def __init__(self, backend=None, order=None):
        self.series = order is not None
        self.backend = backend
        self.order = order

    def const(self, v):
        if self.series:
            return TruncatedSeries.constant(convert(v, self.backend), order=self.order,
                                            backend=self.backend)
        return to_mpf(v) if isinstance(v, (int, Fraction)) else v

    def mulq(self, c, q):
        if self.series:
            return c.scale(Fraction(q))
        return c * to_mpf(q)

    def is_zero(self, c):
        return c.is_zero() if self.series else c == 0

    def lead(self, c):
        return c.coeff(0) if self.series else c

    def rpow(self, c, alpha):
        """c**alpha with the positive root (series: positive constant term)."""
        if self.series:
            return c.power(Fraction(alpha))
        return mpmath.power(c, to_mpf(Fraction(alpha)))


class _Context:
    def __init__(self, p: Potential):
        for t in p.logterms:
            if not t.is_real:
                raise UnsupportedFormError("one-cut engine needs real log points q")
        self.p = p
        self.d = list(p.w0_prime_coeffs())
        self.logs = [(t.mu, t.qr) for t in p.logterms]
        self.mu_total = sum((t.mu for t in p.logterms), Fraction(0))

    def w_derivs(self, z, k_max=3):
        """W′, W″, W‴ at a point (exact for rational z)."""
        out = []
        poly = list(self.p.poly)
        logs = self.logs
        if not isinstance(z, (int, Fraction)):
            poly = [to_mpf(c) for c in poly]
            logs = [(to_mpf(mu), to_mpf(q)) for mu, q in logs]
        for k in range(1, k_max + 1):
            v = sum(c * _falling(m, k) * z ** (m - k) for m, c in enumerate(poly, start=1)
                    if m >= k)
            for mu, q in logs:
                # d^k/dz^k [−μ log(z − q)] = −μ (−1)^{k−1}(k−1)!/(z − q)^k
                v -= mu * (-1) ** (k - 1) * math.factorial(k - 1) / (z - q) ** k
            out.append(v)
        return out


def _falling(m, k):
    out = 1
    for i in range(k):
        out *= m - i
    return out


# ============================================================ the algebra

class _Basis:
    """S[Z^e w^j] for the current (σ₀, ρ₀), cached per monomial."""

    def __init__(self, ctx: _Context, ops: _Ops, sigma, rho):
        self.ctx, self.ops = ctx, ops
        self.sigma, self.rho = sigma, rho
        self.a = ops.mulq(sigma, -2)
        self.b = sigma * sigma - ops.mulq(rho, 4)
        self._lau = {}
        self._val = {}
        self.points = []
        for mu, q in ctx.logs:
            Zq = ops.const(q) - sigma
            D = Zq * Zq - ops.mulq(rho, 4)
            lz, ld = ops.lead(Zq), ops.lead(D)
            if ld <= 0 or lz == 0:
                raise RegimeError(f"log point q={q} lies on the cut [σ₀ − 2√ρ₀, σ₀ + 2√ρ₀]")
            self.points.append((mu, Zq, D, 1 if lz > 0 else -1))

    def _laurent(self, j, m_max):
        """Coefficients f_0..f_m of (1 + a u + b u²)^{−j/2}."""
        f = self._lau.get(j)
        if f is not None and len(f) > m_max:
            return f
        ops, a, b = self.ops, self.a, self.b
        nu = Fraction(j, 2)
        f = [ops.const(1)]
        for m in range(0, m_max):
            t = ops.mulq(a * f[m], m + nu)
            if m >= 1:
                t = t + ops.mulq(b * f[m - 1], m - 1 + 2 * nu)
            f.append(ops.mulq(t, Fraction(-1, m + 1)))
        self._lau[j] = f
        return f

    def value(self, j, e):
        key = (j, e)
        if key in self._val:
            return self._val[key]
        ops = self.ops
        acc = ops.const(0)
        # Z^e w^j = u^{j−e} (1 − σu)^e f(u) with u = 1/z
        for pw, c in enumerate(self.ctx.d):
            if c == 0:
                continue
            m = pw + 1 - j + e
            if m < 0:
                continue
            f = self._laurent(j, m)
            t = f[m]
            if e and m >= 1:
                t = t - self.sigma * f[m - 1]
            acc = acc + ops.mulq(t, c)
        for mu, Zq, D, sgn in self.points:
            v = ops.rpow(D, Fraction(-j, 2))
            if sgn < 0 and j % 2:
                v = -v
            if e:
                v = v * Zq
            acc = acc + ops.mulq(v, mu)
        self._val[key] = acc
        return acc


class _Alg:
    """Elements are dicts (j, e) → coefficient, meaning Σ c·Z^e·w^j."""

    def __init__(self, ops: _Ops, basis: _Basis, dsigma=None, drho=None):
        self.ops, self.basis = ops, basis
        self.rho = basis.rho
        self.ds, self.dr = dsigma, drho

    @staticmethod
    def mono(j, e, c):
        return {(j, e): c}

    def _put(self, out, key, c):
        if key in out:
            out[key] = out[key] + c
        else:
            out[key] = c

    def add(self, *elems):
        out = {}
        for el in elems:
            for k, c in el.items():
                self._put(out, k, c)
        return out

    def scale(self, el, c):
        """Multiply by a function of x (coefficient) or a rational."""
        if isinstance(c, (int, Fraction)):
            return {k: self.ops.mulq(v, c) for k, v in el.items()}
        return {k: v * c for k, v in el.items()}

    def mul(self, A, B):
        out = {}
        four_rho = self.ops.mulq(self.rho, 4)
        for (j1, e1), c1 in A.items():
            for (j2, e2), c2 in B.items():
                c = c1 * c2
                j, e = j1 + j2, e1 + e2
                if e == 2:
                    self._put(out, (j - 2, 0), c)
                    self._put(out, (j, 0), c * four_rho)
                else:
                    self._put(out, (j, e), c)
        return out

    def dx(self, A):
        out = {}
        ds, dr = self.ds, self.dr
        for (j, e), c in A.items():
            self._put(out, (j, e), c.dx())
            if e:
                self._put(out, (j, 0), -(c * ds))
            if j:
                cj = self.ops.mulq(c, j)
                if e:
                    self._put(out, (j, 0), cj * ds)
                    self._put(out, (j + 2, 0), cj * ds * self.ops.mulq(self.rho, 4))
                else:
                    self._put(out, (j + 2, 1), cj * ds)
                self._put(out, (j + 2, e), self.ops.mulq(cj * dr, 2))
        return out

    def S(self, A):
        acc = self.ops.const(0)
        for (j, e), c in A.items():
            acc = acc + c * self.basis.value(j, e)
        return acc

    def prune(self, A):
        return {k: v for k, v in A.items() if not self.ops.is_zero(v)}


def _planar_system(ctx, ops, sigma, rho, x):
    """(F1, F2) and the matrix J = [[4ρA, 2B], [B, 2A]] with A = S[w³], B = S[Zw³]."""
    bs = _Basis(ctx, ops, sigma, rho)
    F1 = bs.value(1, 1) - ops.const(ctx.mu_total) - ops.mulq(x, 2)
    F2 = bs.value(1, 0)
    A, B = bs.value(3, 0), bs.value(3, 1)
    J = ((ops.mulq(rho * A, 4), ops.mulq(B, 2)), (B, ops.mulq(A, 2)))
    return (F1, F2), J, bs


def _hessian_det(J, ops):
    """det of the Hessian of G: G_σσ = J11, G_σρ = J12, G_ρρ = 2·J22."""
    return ops.mulq(J[0][0] * J[1][1], 2) - J[0][1] * J[0][1]


# ================================================================ seeds

def critical_points(p: Potential, prec: int = DEFAULT_PREC):
    """Real critical points of W inside the contour, as (z, W″(z)) pairs.

    Rational roots are returned as Fractions, the rest as mpf.
    """
    ctx = _Context(p)
    # numerator of W′(z) = W₀′(z) − Σ μᵢ/(z − qᵢ) over Π(z − qᵢ)
    prod = [Fraction(1)]
    for _, q in ctx.logs:
        prod = _pmul(prod, [-q, Fraction(1)])
    num = _pmul(ctx.d or [Fraction(0)], prod)
    for i, (mu, _) in enumerate(ctx.logs):
        rest = [Fraction(1)]
        for k, (_, q) in enumerate(ctx.logs):
            if k != i:
                rest = _pmul(rest, [-q, Fraction(1)])
        num = _padd(num, [-mu * c for c in rest])
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    if len(num) < 2:
        return []
    lo, hi = CONTOUR_ENDS[p.contour]
    out = []
    with mp.workdps(prec + 10):
        roots = mpmath.polyroots(list(reversed([to_mpf(c) for c in num])), maxsteps=200,
                                 extraprec=4 * prec)
        for z in roots:
            if abs(mpmath.im(z)) > mpmath.mpf(10) ** (-prec // 2):
                continue
            z = mpmath.re(z)
            fr = Fraction(str(mpmath.nstr(z, prec))).limit_denominator(10 ** 12)
            if _pval(num, fr) == 0:
                z = fr
            if (lo is not None and z <= lo) or (hi is not None and z >= hi):
                continue
            if any(z == q for _, q in ctx.logs):
                continue
            out.append((z, ctx.w_derivs(z, 2)[1]))
    out.sort(key=lambda t: t[0])
    return out


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pval(c, z):
    acc = Fraction(0)
    for v in reversed(c):
        acc = acc * z + v
    return acc


def planar_seed(p: Potential, seed=None, prec: int = DEFAULT_PREC):
    """σ₀(0): the user value, else the unique minimum of W on the contour."""
    if seed is not None:
        return seed
    cps = critical_points(p, prec)
    minima = [z for z, w2 in cps if w2 > 0]
    if len(minima) != 1:
        listing = ", ".join(f"{mpmath.nstr(to_mpf(z), 15)} (W''={mpmath.nstr(to_mpf(w2), 6)})"
                            for z, w2 in cps) or "none"
        raise ValidationError(f"cannot choose the planar seed: critical points of W on the "
                              f"contour are {listing}; pass sigma0(0) explicitly")
    return minima[0]


# ================================================================= planar

@dataclass(frozen=True)
class PlanarState:
    x: object
    rho0: object
    sigma0: object
    jacobian_det: object

    @property
    def endpoints(self):
        h = 2 * mpmath.sqrt(self.rho0)
        return self.sigma0 - h, self.sigma0 + h


def planar_residuals(p: Potential, x, sigma0, rho0, prec: int = DEFAULT_PREC):
    """|LHS − RHS| of the two planar equations at a numeric point."""
    ctx = _Context(p)
    with mp.workdps(prec + 10):
        ops = _Ops()
        (F1, F2), _, _ = _planar_system(ctx, ops, to_mpf(sigma0), to_mpf(rho0), to_mpf(x))
        return abs(F1), abs(F2)


def _newton(ctx, ops, x, s, r, tol):
    for _ in range(MAX_NEWTON):
        (F1, F2), J, _ = _planar_system(ctx, ops, s, r, x)
        det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
        if det == 0:
            raise ConvergenceError(f"singular Newton step at x={mpmath.nstr(x, 10)}")
        ds = (F1 * J[1][1] - J[0][1] * F2) / det
        dr = (J[0][0] * F2 - J[1][0] * F1) / det
        s, r = s - ds, r - dr
        if r <= 0:
            raise RegimeError(f"rho0 left the one-cut regime (rho0 = {mpmath.nstr(r, 6)})")
        if max(abs(ds), abs(dr)) <= tol * (1 + abs(s) + abs(r)):
            (F1, F2), J, _ = _planar_system(ctx, ops, s, r, x)
            return s, r, _hessian_det(J, ops)
    raise ConvergenceError(f"planar Newton did not converge in {MAX_NEWTON} iterations "
                           f"at x={mpmath.nstr(x, 10)}")


def planar_solve_numeric(p: Potential, x, seed=None, prec: int = DEFAULT_PREC,
                         sigma_at_zero=None) -> PlanarState:
    """Solve the planar system at x by Newton iteration.

    ``seed`` is a guess (σ₀, ρ₀) at x itself.  Without it the solution is
    continued from x ≈ 0, where σ₀ → σ₀(0) (a minimum of W) and
    ρ₀ ≈ x/W″(σ₀(0)).
    """
    ctx = _Context(p)
    if to_mpf(x) <= 0:
        raise DomainError("planar solve needs x > 0")
    with mp.workdps(prec + 10):
        ops = _Ops()
        xt = to_mpf(x)
        tol = mpmath.mpf(10) ** (-(prec - 20))
        if seed is not None:
            s, r, det = _newton(ctx, ops, xt, to_mpf(seed[0]), to_mpf(seed[1]), tol)
        else:
            s, r, det = _continue(ctx, ops, p, xt, tol, prec, sigma_at_zero)
        if abs(det) < CRITICAL_DET:
            raise CriticalityError(f"regularity determinant {mpmath.nstr(det, 5)} at "
                                   f"x={mpmath.nstr(xt, 10)}: one-cut ansatz fails")
        return PlanarState(xt, r, s, det)


def _continue(ctx, ops, p, xt, tol, prec, sigma_at_zero):
    s0 = to_mpf(planar_seed(p, sigma_at_zero, prec))
    w2 = ctx.w_derivs(s0, 2)[1]
    x0 = min(xt, mpmath.mpf("1e-3"))
    s, r, det = _newton(ctx, ops, x0, s0, x0 / w2, tol)
    cur, h = x0, (xt - x0) / 8
    prev = None
    while cur < xt:
        nxt = min(cur + h, xt)
        if prev is not None:
            t = (nxt - cur) / (cur - prev[0])
            guess = (s + t * (s - prev[1]), r + t * (r - prev[2]))
        else:
            guess = (s, r)
        try:
            s1, r1, det = _newton(ctx, ops, nxt, guess[0], guess[1], tol)
        except (ConvergenceError, RegimeError):
            h /= 2
            if h < mpmath.mpf("1e-12") * (1 + xt):
                raise ConvergenceError(f"continuation stalled near x={mpmath.nstr(cur, 10)}")
            continue
        if abs(det) < CRITICAL_DET:
            raise CriticalityError(f"regularity determinant {mpmath.nstr(det, 5)} at "
                                   f"x={mpmath.nstr(nxt, 10)}: one-cut ansatz fails")
        prev = (cur, s, r)
        cur, s, r = nxt, s1, r1
        h *= 1.5
    return s, r, det


def _series_backend(s0, backend):
    exact = isinstance(s0, (int, Fraction))
    if backend in (None, "auto"):
        return RATIONAL if exact else FLOAT
    if backend == RATIONAL and not exact:
        raise BackendError("sigma0(0) is irrational; use the float backend")
    return backend


def planar_series(p: Potential, order: int = 8, seed=None, backend=None,
                  prec: int = DEFAULT_PREC):
    """(ρ₀, σ₀) as power series in x through x^order.

    Newton iteration in series arithmetic from (σ₀(0), 0); each step doubles
    the number of correct coefficients.
    """
    ctx = _Context(p)
    s0 = planar_seed(p, seed, prec)
    backend = _series_backend(s0, backend)
    with mp.workdps(prec + 10):
        ops = _Ops(backend, order + 1)
        w2 = ctx.w_derivs(s0, 2)[1]
        if w2 == 0:
            raise DegeneracyError(f"W''(sigma0(0)) = 0 at sigma0(0) = {s0}: singular "
                                  "linearization at x = 0")
        x = TruncatedSeries.x(order=order + 1, backend=backend)
        s = ops.const(s0)
        r = x * convert(1 / w2 if backend == RATIONAL else 1 / to_mpf(w2), backend)
        steps = max(order + 2, 2).bit_length() + 2
        for _ in range(steps):
            (F1, F2), J, _ = _planar_system(ctx, ops, s, r, x)
            det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
            ds = (F1 * J[1][1] - J[0][1] * F2).div(det)
            dr = (J[0][0] * F2 - J[1][0] * F1).div(det)
            s, r = (s - ds).truncate(order + 1), (r - dr).truncate(order + 1)
        (F1, F2), _, _ = _planar_system(ctx, ops, s, r, x)
        _check_small([F1, F2], backend, prec, "planar series residual")
        return r.truncate(order), s.truncate(order)


def _check_small(series_list, backend, prec, what):
    for f in series_list:
        if backend == RATIONAL:
            if not f.is_zero():
                raise ConsistencyError(f"{what} does not vanish")
        else:
            if any(abs(c) > mpmath.mpf(10) ** (-(prec - 15)) for c in f.coeffs):
                raise PrecisionError(f"{what} above tolerance")


# ============================================================ perturbative

@dataclass(frozen=True)
class ResolventAnsatz:
    """R_k = Σ_j (α_j + β_j Z) w^{2j+1}, T̃_k = Σ_j (γ_j + ξ_j Z) w^{2j+1}, j = 1..2k−1."""
    k: int
    alpha: dict
    beta: dict
    gamma: dict
    xi: dict
    stray: tuple = ()   # monomials outside the ansatz with nonzero coefficients


def _ansatz(k, R, T, ops):
    alpha, beta, gamma, xi = {}, {}, {}, {}
    stray = []
    allowed = {2 * j + 1 for j in range(1, 2 * k)}
    for el, (a0, a1), name in ((R, (alpha, beta), "R"), (T, (gamma, xi), "T")):
        for (j, e), c in el.items():
            if ops.is_zero(c):
                continue
            if j in allowed:
                (a1 if e else a0)[(j - 1) // 2] = c
            else:
                stray.append((name, j, e))
    return ResolventAnsatz(k, alpha, beta, gamma, xi, tuple(stray))


@dataclass
class OneCutExpansion:
    k_max: int
    order: int
    backend: str
    rho: list            # ρ_0 .. ρ_{k_max} (coefficients of ε^{2k})
    sigma: list          # σ_0 .. σ_{2k_max} (coefficients of ε^k)
    rho_tilde: list      # coefficients of ε^k in r, all k ≤ 2k_max
    jacobian_det: TruncatedSeries
    ansatz: list = field(default_factory=list)
    genus: list = field(default_factory=list)

    @property
    def sigma_even(self):
        return self.sigma[0::2]


def perturbative_coeffs(p: Potential, order: int = 8, k_max: int = 2, seed=None,
                        backend=None, prec: int = DEFAULT_PREC,
                        with_genus: bool = True) -> OneCutExpansion:
    """Solve the recursion for R_k, T̃_k order by order in ε.

    At each order the two string equations are linear in (σ_k, ρ̃_k) with
    the planar Jacobian as matrix; odd orders are solved the same way and
    checked against the parity constraint s(ε,x) = s(−ε,x+ε).
    """
    if not 0 <= k_max <= 2:
        raise DomainError("k_max must be 0, 1 or 2")
    ctx = _Context(p)
    kk = 2 * k_max
    K = order + kk + 4
    rho0, sig0 = planar_series(p, K, seed, backend, prec)
    backend = rho0.backend
    with mp.workdps(prec + 10):
        ops = _Ops(backend, K)
        rho0 = rho0.truncate(K)
        sig0 = sig0.truncate(K)
        bs = _Basis(ctx, ops, sig0, rho0)
        alg = _Alg(ops, bs, sig0.dx(), rho0.dx())
        (_, _), J, _ = _planar_system(ctx, ops, sig0, rho0, TruncatedSeries.x(K, backend))
        detJ = J[0][0] * J[1][1] - J[0][1] * J[1][0]
        if detJ.valuation() != 0:
            raise CriticalityError("regularity determinant vanishes at x = 0")
        w = alg.mono(1, 0, ops.const(1))
        Zw = alg.mono(1, 1, ops.const(1))
        Zw2 = alg.mono(2, 1, ops.const(1))
        Zw3 = alg.mono(3, 1, ops.const(1))
        w3 = alg.mono(3, 0, ops.const(1))
        R, T = [w], [Zw]
        rt, sg = [rho0], [sig0]
        dR, dT = [[w]], [[Zw]]   # dR[j][i] = ∂^i R_j

        def deriv(store, j, i):
            while len(store[j]) <= i:
                store[j].append(alg.prune(alg.dx(store[j][-1])))
            return store[j][i]

        ansatz = []
        for k in range(1, kk + 1):
            # K1 = 4ρ̃_k R_0² − rest ; here without the ρ̃_k term
            rest = {}
            for i in range(1, k):
                rest = alg.add(rest, alg.mul(T[i], T[k - i]))
            for m in range(0, k + 1):
                for l in range(0, k + 1 - m):
                    for i in range(0, k + 1 - m - l):
                        j = k - m - l - i
                        if (m, l, i, j) in ((0, 0, 0, k), (0, k, 0, 0), (k, 0, 0, 0)):
                            continue
                        term = alg.mul(R[l], deriv(dR, j, i))
                        coef = rt[m] * convert(Fraction((-1) ** i * -4, math.factorial(i)),
                                               backend)
                        rest = alg.add(rest, alg.scale(term, coef))
            K1 = alg.scale(rest, -1)
            K2 = {}
            for i in range(1, k):
                K2 = alg.add(K2, alg.scale(R[k - i], sg[i]))
            for i in range(1, k + 1):
                K2 = alg.add(K2, alg.scale(deriv(dT, k - i, i), Fraction(1, 2 * math.factorial(i))))
            Rk = alg.add(alg.scale(alg.mul(w, K1), Fraction(1, 2)), alg.mul(Zw2, K2))
            Tk = alg.add(alg.mul(alg.mono(0, 1, ops.const(1)), Rk), alg.scale(K2, -1))
            E1, E2 = alg.S(Tk), alg.S(Rk)
            # J·(σ_k, ρ̃_k) = −(E1, E2)
            s_k = (-(E1 * J[1][1]) + J[0][1] * E2).div(detJ)
            r_k = (-(J[0][0] * E2) + J[1][0] * E1).div(detJ)
            Rk = alg.prune(alg.add(Rk, alg.scale(Zw3, s_k), alg.scale(w3, r_k * convert(2, backend))))
            Tk = alg.prune(alg.add(Tk, alg.scale(w3, s_k * rho0 * convert(4, backend)),
                                   alg.scale(Zw3, r_k * convert(2, backend))))
            R.append(Rk)
            T.append(Tk)
            dR.append([Rk])
            dT.append([Tk])
            rt.append(r_k)
            sg.append(s_k)
            ansatz.append(_ansatz(k, Rk, Tk, ops))
        hdet = _hessian_det(J, ops)
    exp = OneCutExpansion(
        k_max=k_max, order=order, backend=backend,
        rho=[rt[2 * k].truncate(order) for k in range(k_max + 1)],
        sigma=[s.truncate(order) for s in sg],
        rho_tilde=[r.truncate(order) for r in rt],
        jacobian_det=hdet.truncate(order),
        ansatz=ansatz,
    )
    _enforce_parity(exp, rt, sg)
    if with_genus:
        exp.genus = genus_free_energy(exp, full=(rt, K))
    return exp


def parity_defects(sigma, rho_tilde):
    """Series defects of r(ε,x) = r(−ε,x) and s(ε,x) = s(−ε,x+ε), order by order."""
    out = []
    for k in range(1, len(sigma)):
        acc = sigma[k] - (-1) ** k * sigma[k]
        for i in range(1, k + 1):
            d = sigma[k - i]
            for _ in range(i):
                d = d.dx()
            acc = acc - d * convert(Fraction((-1) ** (k - i), math.factorial(i)), d.backend)
        out.append(("s", k, acc))
        if k % 2:
            out.append(("r", k, rho_tilde[k]))
    return out


def _enforce_parity(exp, rt, sg):
    for name, k, d in parity_defects(sg, rt):
        if exp.backend == RATIONAL:
            bad = not d.is_zero()
        else:
            scale = max([abs(c) for c in sg[0].coeffs] + [mpmath.mpf(1)])
            bad = any(abs(c) > mpmath.mpf(10) ** (-(mp.dps // 2)) * scale for c in d.coeffs)
        if bad:
            raise ConsistencyError(f"parity constraint violated for {name} at order eps^{k}")


# ============================================================ free energy

def genus_free_energy(exp: OneCutExpansion, regularized: bool = False, full=None):
    """[𝓕₀, 𝓕₁, 𝓕₂] (through 𝓕_{k_max}) as LogSeries in x."""
    if full is not None:
        rt, _ = full
        rho = [rt[2 * k] for k in range(exp.k_max + 1)]
    else:
        rho = exp.rho
    r0 = rho[0]
    if r0.valuation() != 1 or r0.coeff(1) <= 0:
        raise RegularizationError("rho0 must behave as c*x with c > 0 near x = 0")
    L0 = LogSeries.log_of(r0)
    out = [genus_kernel(L0, regularized)]
    if exp.k_max >= 1:
        q1 = rho[1].div(r0, allow_laurent=True)
        out.append(genus_kernel(q1, regularized) - L0.scale(Fraction(1, 12)))
    if exp.k_max >= 2:
        q2 = rho[2].div(r0, allow_laurent=True)
        inner = q2 - (q1 * q1).scale(Fraction(1, 2))
        out.append(genus_kernel(inner, regularized) - LogSeries(q1).scale(Fraction(1, 12))
                   + L0.dx().dx().scale(Fraction(1, 240)))
    return [g.truncate(exp.order) for g in out]


def genus_total(genus, eps, x, prec: int = DEFAULT_PREC):
    """Σ_k ε^{2k−2} 𝓕_k(x) from truncated genus coefficients."""
    with mp.workdps(prec + 10):
        e = to_mpf(eps)
        return mpmath.fsum(g.evaluate(x) * e ** (2 * k - 2) for k, g in enumerate(genus))


# ================================================================ gaussian

def f_gaussian(eps, x, k_max: int, full: bool = False, prec: int = DEFAULT_PREC):
    """𝓕^G(ε,x) truncated after k_max correction terms; ``full`` adds the
    linear terms x log(2π)/ε + log(ε)/12 + ζ′(−1)."""
    with mp.workdps(prec + 10):
        e, xv = to_mpf(eps), to_mpf(x)
        if e <= 0 or xv <= 0:
            raise DomainError("f_gaussian needs eps > 0 and x > 0")
        acc = xv ** 2 * (mpmath.log(xv) / 2 - mpmath.mpf(3) / 4) / e ** 2 - mpmath.log(xv) / 12
        for k in range(1, k_max + 1):
            acc += to_mpf(bernoulli(2 * k + 2)) * e ** (2 * k) / (2 * k * (2 * k + 2) * xv ** (2 * k))
        if full:
            acc += xv * mpmath.log(2 * mpmath.pi) / e + mpmath.log(e) / 12 \
                + zeta_prime_minus_one(prec)
        return +acc


@dataclass(frozen=True)
class GaussianTerm:
    """sign·𝓕^G(c·ε, a·x + b)."""
    sign: int
    c: Fraction
    a: Fraction
    b: Fraction


@dataclass(frozen=True)
class Decomposition:
    terms: tuple
    # remainder (r0 + r1 x + r2 x²)/ε² + r_const, coefficients LogLinear
    rem2: tuple
    rem_const: LogLinear

    def evaluate(self, eps, x, k_max: int, prec: int = DEFAULT_PREC):
        with mp.workdps(prec + 10):
            e, xv = to_mpf(eps), to_mpf(x)
            acc = mpmath.mpf(0)
            for t in self.terms:
                acc += t.sign * f_gaussian(to_mpf(t.c) * e, to_mpf(t.a) * xv + to_mpf(t.b),
                                           k_max, prec=prec)
            r0, r1, r2 = (_ll(v, prec) for v in self.rem2)
            acc += (r0 + r1 * xv + r2 * xv ** 2) / e ** 2 + _ll(self.rem_const, prec)
            return +acc

    def genus_coefficient(self, g: int, order: int = 8) -> LogSeries:
        """Coefficient of ε^{2g−2} as a LogSeries in x."""
        total = LogSeries(TruncatedSeries.zero(order=order))
        for t in self.terms:
            total = total + _gauss_genus(t, g, order).scale(t.sign)
        if g == 0:
            poly = TruncatedSeries(list(self.rem2), order=order)
            total = total + poly
        elif g == 1:
            total = total + self.rem_const
        return total.truncate(order)


def _ll(v, prec):
    return v.value(prec + 10) if isinstance(v, LogLinear) else to_mpf(v)


def _log_linear_series(a, b, order):
    """log(a x + b) as a LogSeries (exact)."""
    if b == 0:
        return LogSeries(TruncatedSeries.constant(LogLinear.log_of(a).simplify(), order=order),
                         TruncatedSeries.constant(1, order=order))
    return LogSeries.log_of(TruncatedSeries([b, a], order=order))


def _gauss_genus(t: GaussianTerm, g: int, order: int) -> LogSeries:
    a, b, c = t.a, t.b, t.c
    y = TruncatedSeries([b, a], order=order + 2)
    if g == 0:
        L = _log_linear_series(a, b, order + 2)
        return (L * (y * y)).scale(Fraction(1, 2) / c ** 2) \
            - LogSeries(y * y).scale(Fraction(3, 4) / c ** 2)
    if g == 1:
        return _log_linear_series(a, b, order + 2).scale(Fraction(-1, 12))
    m = 2 * g - 2
    coef = bernoulli(2 * g) * c ** m / (m * (m + 2))
    if b == 0:
        ser = TruncatedSeries([coef / a ** m], order=order - m, val=-m)
    else:
        ser = TruncatedSeries([b, a], order=order + m).power(-m).scale(coef)
    return LogSeries(ser)


def _rat(v, what):
    try:
        return Fraction(v)
    except (TypeError, ValueError):
        raise UnsupportedFormError(f"{what} must be rational, got {v!r}") from None


def _linear(f):
    if isinstance(f, (tuple, list)) and len(f) == 2:
        return _rat(f[0], "factor slope"), _rat(f[1], "factor offset")
    raise UnsupportedFormError(f"factor {f!r} is not a linear (a, b) pair")


def gaussian_decomposition(numerator, denominator=(), eps_blocks=(), constant=1) -> Decomposition:
    """Decompose 𝓕 for r = C·Π(aᵢx+bᵢ)/Π(a_jx+b_j)/Π blocks.

    A block (a, b) stands for (ax+b)²(ax+b−aε/2)(ax+b+aε/2) in the
    denominator.  Its log is 4cosh²(ε∂/4) log(ax+b), so it contributes like
    a single factor ax+b with ε replaced by ε/2 and the opposite sign.
    """
    C = _rat(constant, "constant factor")
    if C <= 0:
        raise UnsupportedFormError("constant factor must be positive")
    terms = []
    r0 = r1 = r2 = LogLinear(Fraction(0))
    rc = LogLinear(Fraction(0))
    items = [(f, 1, 1) for f in numerator] + [(f, -1, 1) for f in denominator] \
        + [(f, -1, Fraction(1, 2)) for f in eps_blocks]
    for f, sign, scale in items:
        a, b = _linear(f)
        if a == 0:
            # constant factor b
            if b <= 0:
                raise UnsupportedFormError("nonpositive constant factor")
            lb = LogLinear.log_of(b).simplify() * sign
            if scale != 1:
                # a constant block is b⁴: 4·(x²log b/2ε²) − 4·(log b)/12
                lb = lb * 4
            r2 = r2 + lb * Fraction(1, 2)
            rc = rc - lb * Fraction(1, 12)
            continue
        if b < 0 or (b == 0 and a < 0):
            raise UnsupportedFormError(f"factor {a}x + {b} is not positive for small x > 0")
        terms.append(GaussianTerm(sign, a * scale, a, b))
        if b:
            # b/(4 ε'² a²)(3b + 4ax − 2(b + 2ax) log b) with ε' = scale·ε
            k = b / (4 * scale ** 2 * a * a) * sign
            lb = LogLinear.log_of(b).simplify()
            r0 = r0 + (LogLinear(3 * b) - lb * (2 * b)) * k
            r1 = r1 + (LogLinear(4 * a) - lb * (4 * a)) * k
    if C != 1:
        lc = LogLinear.log_of(C).simplify()
        r2 = r2 + lc * Fraction(1, 2)
        rc = rc - lc * Fraction(1, 12)
    return Decomposition(tuple(terms), (r0.simplify(), r1.simplify(), r2.simplify()),
                         rc.simplify())


def flin_linear_penner(eps, x, k_max: int, prec: int = DEFAULT_PREC):
    """F_lin of the linear Penner model (ε-expansion through ε^{2k_max})."""
    with mp.workdps(prec + 10):
        e, xv = to_mpf(eps), to_mpf(x)
        acc = -xv / e ** 2 + xv * mpmath.log(2 * mpmath.pi) / e + mpmath.log(e) / 12 \
            + zeta_prime_minus_one(prec)
        for k in range(1, k_max + 1):
            acc -= e ** (2 * k) * to_mpf(bernoulli(2 * k + 2)) / (2 * k * (2 * k + 2))
        return +acc


def flin_double_penner(eps, x, mu0, mu1, k_max: int, prec: int = DEFAULT_PREC):
    """F_lin of the double Penner model."""
    with mp.workdps(prec + 10):
        e, xv, m0, m1 = (to_mpf(v) for v in (eps, x, mu0, mu1))
        L = mpmath.log
        acc = L(e) / 12 + xv * L(2 * mpmath.pi) / e \
            + xv / e ** 2 * (m0 * L(m0) + m1 * L(m1) - (m0 + m1) * L(m0 + m1)) \
            + L(m0 * m1) / 12 + zeta_prime_minus_one(prec)
        for k in range(1, k_max + 1):
            acc -= e ** (2 * k) * to_mpf(bernoulli(2 * k + 2)) / (2 * k * (2 * k + 2)) \
                * (1 / m0 ** (2 * k) + 1 / m1 ** (2 * k))
        return +acc


def fit_linear_term(logZ, genus, N, n_values, prec: int = DEFAULT_PREC):
    """Least-squares c₀ + c₁x to F_n − 𝓕(ε, n/N) over the given n.

    ``logZ`` maps n to log Z_n.  Returns (c0, c1, max residual).
    """
    with mp.workdps(prec + 10):
        eps = 1 / to_mpf(N)
        xs, ys = [], []
        for n in n_values:
            x = to_mpf(n) / to_mpf(N)
            xs.append(x)
            ys.append(to_mpf(logZ(n)) - genus_total(genus, eps, x, prec))
        m = len(xs)
        if m < 2:
            raise DomainError("need at least two n values to fit c0 + c1 x")
        sx, sy = mpmath.fsum(xs), mpmath.fsum(ys)
        sxx = mpmath.fsum(v * v for v in xs)
        sxy = mpmath.fsum(a * b for a, b in zip(xs, ys))
        den = m * sxx - sx * sx
        c1 = (m * sxy - sx * sy) / den
        c0 = (sy - c1 * sx) / m
        res = max(abs(y - c0 - c1 * x) for x, y in zip(xs, ys))
        return c0, c1, res


__all__ = [
    "PlanarState", "OneCutExpansion", "ResolventAnsatz", "GaussianTerm", "Decomposition",
    "critical_points", "planar_seed", "planar_solve_numeric", "planar_residuals",
    "planar_series", "perturbative_coeffs", "parity_defects", "genus_free_energy",
    "genus_total", "f_gaussian", "gaussian_decomposition", "flin_linear_penner",
    "flin_double_penner", "fit_linear_term",
]
