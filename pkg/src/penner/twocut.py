"""Two-cut continuum limit of Z₂-symmetric Penner models.

Odd and even recurrence coefficients follow two branches a(ε,t), b(ε,t)
and T_m(λ) follows U (odd m) or V (even m), all as functions of t = m/N.
Functions of λ are carried as local expansions: a Laurent series in 1/λ
at infinity (for the residue term) and a Taylor series around each log
point λᵢ = qᵢ² (for the point values).  Division by λ, which the order-ε²
solve needs, is then just a shift or a geometric series.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import (ConsistencyError, ConvergenceError, DomainError, MergingCutsError,
                     PrecisionError, RegimeError, UnsupportedFormError, ValidationError)
from .model import Potential
from .numerics import DEFAULT_PREC, FLOAT, RATIONAL, to_mpf, zeta_prime_minus_one
from .onecut import _Ops, critical_points
from .series import LogSeries, TruncatedSeries, genus_kernel

EXACT = 10 ** 6          # truncation marker for exactly known expansions
MERGE_DET = mpmath.mpf("1e-8")
MAX_NEWTON = 50


# ====================================================== local expansions

class _Loc:
    """Σ_i c[i] ζ^{low+i}, known through ζ^M."""

    __slots__ = ("c", "low", "M")

    def __init__(self, c, low, M):
        self.c, self.low, self.M = list(c), low, M
        if self.low + len(self.c) - 1 > M:
            self.c = self.c[:max(M - low + 1, 0)]

    def get(self, k, ops):
        i = k - self.low
        if k > self.M:
            raise PrecisionError(f"local coefficient zeta^{k} beyond known order {self.M}")
        return self.c[i] if 0 <= i < len(self.c) else ops.const(0)


class _Fn:
    """A function of λ given by its local expansions (key 'inf' or λᵢ)."""

    def __init__(self, ops, locs):
        self.ops, self.locs = ops, locs

    def _zip(self, other, f):
        return _Fn(self.ops, {k: f(v, other.locs[k]) for k, v in self.locs.items()})

    def __add__(self, other):
        ops = self.ops

        def add(a, b):
            low, M = min(a.low, b.low), min(a.M, b.M)
            hi = min(M, max(a.low + len(a.c), b.low + len(b.c)) - 1)
            return _Loc([a.get(k, ops) + b.get(k, ops) for k in range(low, hi + 1)], low, M)
        return self._zip(other, add)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, _Fn):
            return self.scale(other)
        ops = self.ops

        def mul(a, b):
            low = a.low + b.low
            M = min(a.M + b.low, b.M + a.low)
            n = min(M - low + 1, len(a.c) + len(b.c) - 1)
            out = [ops.const(0) for _ in range(max(n, 0))]
            for i, ai in enumerate(a.c):
                for j, bj in enumerate(b.c):
                    if i + j >= len(out):
                        break
                    out[i + j] = out[i + j] + ai * bj
            return _Loc(out, low, M)
        return self._zip(other, mul)

    def scale(self, c):
        ops = self.ops
        if isinstance(c, (int, Fraction)):
            f = (lambda v: ops.mulq(v, c))
        else:
            f = (lambda v: v * c)
        return _Fn(ops, {k: _Loc([f(v) for v in a.c], a.low, a.M) for k, a in self.locs.items()})

    def dx(self):
        return _Fn(self.ops, {k: _Loc([v.dx() for v in a.c], a.low, a.M)
                              for k, a in self.locs.items()})

    def coeff(self, key, k):
        return self.locs[key].get(k, self.ops)


class _Space:
    """Builds λ, 1/λ, u and the string functional for given (α₀, β₀)."""

    def __init__(self, p: Potential, ops: _Ops, alpha, beta, m_inf: int, m_pt: int = 6):
        if not p.z2:
            raise ValidationError("the two-cut engine needs a Z2-symmetric potential")
        self.ops = ops
        self.vp = p.v_prime_coeffs()
        self.points = []
        for mu, q in p.pairs():
            re, im = q
            if re and im:
                raise UnsupportedFormError("log points must be real or purely imaginary")
            self.points.append((mu, re * re - im * im))
        self.mu_total = sum((mu for mu, _ in self.points), Fraction(0))
        self.keys = ["inf"] + sorted({lam for _, lam in self.points})
        self.m_inf, self.m_pt = m_inf, m_pt
        self.alpha, self.beta = alpha, beta
        self.s = alpha + beta
        self.pp = alpha * beta
        self.lam = self._lam()
        self.inv_lam = self._inv_lam()
        self.u = self._u()

    def const(self, v):
        ops = self.ops
        return _Fn(ops, {k: _Loc([ops.const(v) if not hasattr(v, "dx") else v], 0, EXACT)
                         for k in self.keys})

    def _lam(self):
        ops = self.ops
        locs = {"inf": _Loc([ops.const(1)], -1, EXACT)}
        for k in self.keys[1:]:
            locs[k] = _Loc([ops.const(k), ops.const(1)], 0, EXACT)
        return _Fn(ops, locs)

    def _inv_lam(self):
        ops = self.ops
        locs = {"inf": _Loc([ops.const(1)], 1, EXACT)}
        for k in self.keys[1:]:
            if k == 0:
                locs[k] = _Loc([ops.const(1)], -1, EXACT)
            else:
                locs[k] = _Loc([ops.const(Fraction((-1) ** i) / Fraction(k) ** (i + 1))
                                for i in range(self.m_pt + 1)], 0, self.m_pt)
        return _Fn(ops, locs)

    @staticmethod
    def _gen(ops, a, b, n):
        """f_0..f_n of (1 + a ζ + b ζ²)^{−1/2}."""
        f = [ops.const(1)]
        for m in range(n):
            t = ops.mulq(a * f[m], m + Fraction(1, 2))
            if m >= 1:
                t = t + ops.mulq(b * f[m - 1], m)
            f.append(ops.mulq(t, Fraction(-1, m + 1)))
        return f

    def _u(self):
        ops, s, pp = self.ops, self.s, self.pp
        locs = {"inf": _Loc(self._gen(ops, ops.mulq(s, -2), s * s - ops.mulq(pp, 4),
                                      self.m_inf - 1), 1, self.m_inf)}
        for k in self.keys[1:]:
            d = ops.const(k) - s
            D0 = d * d - ops.mulq(pp, 4)
            ld, lD = ops.lead(d), ops.lead(D0)
            if lD <= 0 or ld == 0:
                raise RegimeError(f"log point lambda={k} lies on a cut")
            inv = D0.inverse() if ops.series else 1 / D0
            lead = ops.rpow(D0, Fraction(-1, 2))
            if ld < 0:
                lead = -lead
            f = self._gen(ops, ops.mulq(d * inv, 2), inv, self.m_pt)
            locs[k] = _Loc([lead * c for c in f], 0, self.m_pt)
        return _Fn(ops, locs)

    def S(self, F: _Fn):
        """Res_∞[V′(λ) F] + Σ μᵢ F(λᵢ)."""
        ops = self.ops
        acc = ops.const(0)
        for pw, c in enumerate(self.vp):
            if c:
                acc = acc + ops.mulq(F.coeff("inf", pw + 1), c)
        for mu, lam in self.points:
            loc = F.locs[lam]
            for k in range(loc.low, 0):
                if not ops.is_zero(loc.get(k, ops)):
                    raise ConsistencyError(f"pole at the log point lambda={lam}")
            acc = acc + ops.mulq(loc.get(0, ops), mu)
        return acc


def _planar_eqs(sp: _Space, x):
    """F = (S[U₀] − Σμ − x, S[V₀] − Σμ − x) and its Jacobian in (α₀, β₀)."""
    ops = sp.ops
    a, b, s = sp.alpha, sp.beta, sp.s
    lam, u = sp.lam, sp.u
    u3 = u * u * u
    U0 = (lam + sp.const(a - b)) * u
    V0 = (lam + sp.const(b - a)) * u
    sa = lam - sp.const(s) + sp.const(ops.mulq(b, 2))   # ∂u/∂α = u³(λ − s + 2β)
    sb = lam - sp.const(s) + sp.const(ops.mulq(a, 2))
    dUa = u + (lam + sp.const(a - b)) * u3 * sa
    dUb = -u + (lam + sp.const(a - b)) * u3 * sb
    dVa = -u + (lam + sp.const(b - a)) * u3 * sa
    dVb = u + (lam + sp.const(b - a)) * u3 * sb
    rhs = ops.const(sp.mu_total) + (ops.mulq(x, 1) if not isinstance(x, (int, Fraction))
                                    else ops.const(x))
    F = (sp.S(U0) - rhs, sp.S(V0) - rhs)
    J = ((sp.S(dUa), sp.S(dUb)), (sp.S(dVa), sp.S(dVb)))
    return F, J, U0, V0


# ================================================================ planar

@dataclass(frozen=True)
class TwoCutPlanar:
    x: object
    alpha0: object
    beta0: object
    endpoints: tuple
    jacobian_det: object


def _m_inf(p):
    return len(p.v_prime_coeffs()) + 8


def twocut_residuals(p: Potential, x, alpha0, beta0, prec: int = DEFAULT_PREC):
    with mp.workdps(prec + 10):
        sp = _Space(p, _Ops(), to_mpf(alpha0), to_mpf(beta0), _m_inf(p))
        F, _, _, _ = _planar_eqs(sp, to_mpf(x))
        return abs(F[0]), abs(F[1])


def _newton(p, x, a, b, tol):
    ops = _Ops()
    for _ in range(MAX_NEWTON):
        if b < 0:
            raise RegimeError("beta0 < 0: one-cut regime, use the one-cut engine")
        sp = _Space(p, ops, a, b, _m_inf(p))
        F, J, _, _ = _planar_eqs(sp, x)
        det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
        if det == 0:
            raise MergingCutsError("singular two-cut Jacobian")
        da = (F[0] * J[1][1] - J[0][1] * F[1]) / det
        db = (J[0][0] * F[1] - J[1][0] * F[0]) / det
        a, b = a - da, b - db
        if max(abs(da), abs(db)) <= tol * (1 + abs(a) + abs(b)):
            if b < 0:
                raise RegimeError("beta0 < 0: one-cut regime, use the one-cut engine")
            sp = _Space(p, ops, a, b, _m_inf(p))
            _, J, _, _ = _planar_eqs(sp, x)
            return a, b, J[0][0] * J[1][1] - J[0][1] * J[1][0]
    raise ConvergenceError(f"two-cut Newton did not converge at x={mpmath.nstr(x, 10)}")


def twocut_seed(p: Potential, prec: int = DEFAULT_PREC):
    """α₀(0): square of the positive minimum of W (cuts shrink to ±z*)."""
    cps = [(z, w2) for z, w2 in critical_points(p, prec) if z > 0 and w2 > 0]
    if len(cps) != 1:
        raise ValidationError("cannot choose the two-cut seed: positive minima of W are "
                              + (", ".join(str(z) for z, _ in cps) or "none")
                              + "; pass alpha0(0) explicitly")
    return cps[0][0] ** 2


def twocut_planar_solve(p: Potential, x, seed=None, prec: int = DEFAULT_PREC) -> TwoCutPlanar:
    """Newton solve of the two planar equations for (α₀, β₀) at x.

    ``seed`` is a guess (α₀, β₀) at x; by default the solution is continued
    from x ≈ 0 where α₀ → z*², β₀ → 0.
    """
    if not p.z2:
        raise ValidationError("the two-cut engine needs a Z2-symmetric potential")
    if to_mpf(x) <= 0:
        raise DomainError("two-cut solve needs x > 0")
    with mp.workdps(prec + 10):
        xt = to_mpf(x)
        tol = mpmath.mpf(10) ** (-(prec - 20))
        if seed is not None:
            a, b, det = _newton(p, xt, to_mpf(seed[0]), to_mpf(seed[1]), tol)
        else:
            a0 = to_mpf(twocut_seed(p, prec))
            x0 = min(xt, mpmath.mpf("1e-3"))
            alpha_s, beta_s = twocut_planar_series(p, 3, prec=prec)
            a, b, det = _newton(p, x0, alpha_s.evaluate(x0) if alpha_s else a0,
                                beta_s.evaluate(x0), tol)
            cur, h = x0, (xt - x0) / 8
            while cur < xt:
                nxt = min(cur + h, xt)
                try:
                    a1, b1, det1 = _newton(p, nxt, a, b, tol)
                except (ConvergenceError, RegimeError, MergingCutsError):
                    h /= 2
                    if h < mpmath.mpf("1e-12") * (1 + xt):
                        gap = mpmath.sqrt(a) - mpmath.sqrt(abs(b))
                        if gap < mpmath.mpf("1e-3") * mpmath.sqrt(a):
                            raise MergingCutsError(
                                f"inner endpoints collapse near x={mpmath.nstr(cur, 10)}: "
                                "the cuts merge") from None
                        raise ConvergenceError(f"continuation stalled near x={mpmath.nstr(cur, 10)}")
                    continue
                cur, a, b, det = nxt, a1, b1, det1
                h *= 1.5
        if abs(det) < MERGE_DET:
            raise MergingCutsError(f"two-cut Jacobian determinant {mpmath.nstr(det, 5)} at "
                                   f"x={mpmath.nstr(xt, 10)}: the cuts merge")
        ra, rb = mpmath.sqrt(a), mpmath.sqrt(b)
        return TwoCutPlanar(xt, a, b, (ra - rb, ra + rb), det)


def twocut_planar_series(p: Potential, order: int = 8, seed=None, backend=None,
                         prec: int = DEFAULT_PREC):
    """(α₀, β₀) as power series in x from α₀(0) = z*², β₀(0) = 0."""
    a0 = twocut_seed(p, prec) if seed is None else seed
    exact = isinstance(a0, (int, Fraction))
    backend = backend or (RATIONAL if exact else FLOAT)
    with mp.workdps(prec + 10):
        K = order + 1
        ops = _Ops(backend, K)
        x = TruncatedSeries.x(order=K, backend=backend)
        a = ops.const(a0)
        b = x
        for _ in range(max(order + 2, 2).bit_length() + 3):
            sp = _Space(p, ops, a, b, _m_inf(p))
            F, J, _, _ = _planar_eqs(sp, x)
            det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
            if det.valuation() != 0:
                raise MergingCutsError("two-cut Jacobian is singular at x = 0")
            da = (F[0] * J[1][1] - J[0][1] * F[1]).div(det)
            db = (J[0][0] * F[1] - J[1][0] * F[0]).div(det)
            a, b = (a - da).truncate(K), (b - db).truncate(K)
        sp = _Space(p, ops, a, b, _m_inf(p))
        F, _, _, _ = _planar_eqs(sp, x)
        _small(F, backend, prec, "two-cut planar series residual")
        return a.truncate(order), b.truncate(order)


def _small(items, backend, prec, what):
    for f in items:
        if backend == RATIONAL:
            if not f.is_zero():
                raise ConsistencyError(f"{what} does not vanish")
        elif any(abs(c) > mpmath.mpf(10) ** (-(prec - 15)) for c in f.coeffs):
            raise PrecisionError(f"{what} above tolerance")


# ========================================================= perturbative

@dataclass
class TwoCutExpansion:
    order: int
    backend: str
    alpha: list
    beta: list
    U: list = field(default_factory=list)      # per order: {'R': [...], 'S': [...]}
    V: list = field(default_factory=list)
    A_coeffs: list = field(default_factory=list)
    B_coeffs: list = field(default_factory=list)
    split_residuals: list = field(default_factory=list)
    ansatz_defect: object = 0


def _decompose(F: _Fn, sp: _Space, k):
    ops = sp.ops
    rem = F
    R, S = [], []
    u2 = sp.u * sp.u
    pw = sp.u
    for j in range(3 * k + 1):
        # λ u^{2j+1} = ζ^{2j}(1 + …) and u^{2j+1} = ζ^{2j+1}(1 + …)
        Sj = rem.coeff("inf", 2 * j)
        rem = rem - sp.lam * pw * sp.const(Sj) if not ops.is_zero(Sj) else rem
        Rj = rem.coeff("inf", 2 * j + 1)
        rem = rem - pw * sp.const(Rj) if not ops.is_zero(Rj) else rem
        R.append(Rj)
        S.append(Sj)
        pw = pw * u2
    return R, S, rem


def twocut_perturbative(p: Potential, order: int = 6, k_max: int = 1, seed=None,
                        backend=None, prec: int = DEFAULT_PREC,
                        regularized: bool = False) -> TwoCutExpansion:
    """α_k, β_k (k ≤ 1) from the split recurrence and string equations."""
    if k_max not in (0, 1):
        raise DomainError("k_max must be 0 or 1")
    K = order + 4
    a0, b0 = twocut_planar_series(p, K, seed, backend, prec)
    backend = a0.backend
    with mp.workdps(prec + 10):
        ops = _Ops(backend, K)
        sp = _Space(p, ops, a0, b0, _m_inf(p) + 6 * k_max + 4)
        x = TruncatedSeries.x(order=K, backend=backend)
        _, J, U0, V0 = _planar_eqs(sp, x)
        lam, u = sp.lam, sp.u
        P0 = U0 + V0
        alpha, beta = [a0], [b0]
        Us, Vs = [U0], [V0]
        if k_max >= 1:
            U1d, V1d = U0.dx(), V0.dx()
            U2d, V2d = U1d.dx(), V1d.dx()
            ra = sp.const(a0) * (P0 * V2d - V1d * V1d)
            rb = sp.const(b0) * (P0 * U2d - U1d * U1d)
            ls = lam - sp.const(a0 + b0)
            half = Fraction(1, 2)
            # U1 = u((λ−s)ra + 2α₀ rb)/(2λ), V1 = u((λ−s)rb + 2β₀ ra)/(2λ)
            Ub = (u * (ls * ra + rb * sp.const(ops.mulq(a0, 2))) * sp.inv_lam).scale(half)
            Vb = (u * (ls * rb + ra * sp.const(ops.mulq(b0, 2))) * sp.inv_lam).scale(half)
            u3 = u * u * u
            # unit responses to α₁ and β₁
            Ua = (lam * ls * u3).scale(2)
            Va = (lam * u3 * sp.const(b0)).scale(4)
            Ub_ = (lam * u3 * sp.const(a0)).scale(4)
            Vb_ = (lam * ls * u3).scale(2)
            E1, E2 = sp.S(Ub), sp.S(Vb)
            M = ((sp.S(Ua), sp.S(Ub_)), (sp.S(Va), sp.S(Vb_)))
            dM = M[0][0] * M[1][1] - M[0][1] * M[1][0]
            if dM.valuation() != 0:
                raise MergingCutsError("singular order-eps^2 two-cut system")
            a1 = (-(E1 * M[1][1]) + M[0][1] * E2).div(dM)
            b1 = (-(M[0][0] * E2) + M[1][0] * E1).div(dM)
            U1 = Ub + Ua * sp.const(a1) + Ub_ * sp.const(b1)
            V1 = Vb + Va * sp.const(a1) + Vb_ * sp.const(b1)
            alpha.append(a1)
            beta.append(b1)
            Us.append(U1)
            Vs.append(V1)
        exp = TwoCutExpansion(order, backend, [a.truncate(order) for a in alpha],
                              [b.truncate(order) for b in beta])
        for k, (Uk, Vk) in enumerate(zip(Us, Vs)):
            R, S, remU = _decompose(Uk, sp, k)
            Rv, Sv, remV = _decompose(Vk, sp, k)
            exp.ansatz_defect = max(exp.ansatz_defect, _fn_max(remU, order), _fn_max(remV, order))
            exp.U.append({"R": [c.truncate(order) for c in R], "S": [c.truncate(order) for c in S]})
            exp.V.append({"R": [c.truncate(order) for c in Rv],
                          "S": [c.truncate(order) for c in Sv]})
        exp.split_residuals = _split_residuals(sp, alpha, beta, Us, Vs)
    return exp


def _split_residuals(sp, alpha, beta, Us, Vs):
    """Coefficients of ε⁰ and ε² in a(U+V(x−ε))(U+V(x+ε)) − λ(U²−1) and the V/U swap."""
    c = sp.const
    lam = sp.lam
    out = []
    for (A, B, X, Y) in ((alpha, beta, Us, Vs), (beta, alpha, Vs, Us)):
        P0 = X[0] + Y[0]
        r0 = c(A[0]) * P0 * P0 - lam * (X[0] * X[0] - c(1))
        out.append((0, r0))
        if len(X) > 1:
            Y1d = Y[0].dx()
            P1 = X[1] + Y[1]
            r1 = (c(A[1]) * P0 * P0 + c(A[0]) * (P0 * P1.scale(2) + P0 * Y1d.dx() - Y1d * Y1d)
                  - lam * (X[0] * X[1]).scale(2))
            out.append((1, r1))
    return out


def _fn_max(F: _Fn, order):
    worst = 0
    for loc in F.locs.values():
        hi = min(loc.M, loc.low + len(loc.c) - 1)
        for k in range(loc.low, hi + 1):
            for cc in loc.get(k, F.ops).truncate(order).coeffs:
                worst = max(worst, abs(cc))
    return worst


def split_defect(exp: TwoCutExpansion):
    """Largest local coefficient of the split-identity residuals (0 when exact)."""
    return max((_fn_max(F, exp.order) for _, F in exp.split_residuals), default=0)


# =========================================================== free energy

def branch_free_energy(exp: TwoCutExpansion, regularized: bool = False):
    """(𝓐₀, 𝓐₁), (𝓑₀, 𝓑₁) as LogSeries; singular t⁻² parts need ``regularized``."""
    a0, b0 = exp.alpha[0], exp.beta[0]
    if b0.valuation() != 1 or a0.valuation() != 0:
        raise DomainError("expected beta0 = c*x*(1+O(x)) and alpha0(0) != 0")
    L = LogSeries.log_of(a0) + LogSeries.log_of(b0)
    A0 = genus_kernel(L, regularized).scale(Fraction(1, 2))
    A, B = [A0], [A0]
    if len(exp.alpha) > 1:
        a1, b1 = exp.alpha[1], exp.beta[1]
        base = a1.div(a0) + b1.div(b0, allow_laurent=True)

        def curv(f):
            d1 = f.dx()
            return (f.dx().dx().div(f, allow_laurent=True).scale(Fraction(1, 2))
                    - (d1.div(f, allow_laurent=True) ** 2).scale(Fraction(1, 2)))
        sixth = L.scale(Fraction(1, 6))
        A.append(genus_kernel(base + curv(b0), regularized).scale(Fraction(1, 2)) - sixth)
        B.append(genus_kernel(base + curv(a0), regularized).scale(Fraction(1, 2)) - sixth)
    exp.A_coeffs, exp.B_coeffs = A, B
    return A, B


# ===================================================== gaussian Penner

def _gp_common(eps, X):
    L = mpmath.log
    return ((X ** 2 * L(X) + (1 + X) * (-3 * X + (1 + X) * L(1 + X))) / (4 * eps ** 2)
            + L(2 * mpmath.pi) * X / eps + L(eps) / 6)


def gp_branch(branch: str, eps, X, order: int = 1, prec: int = DEFAULT_PREC):
    """Gaussian-Penner free-energy branch A (odd n) or B (even n).

    ``order`` 0 stops at ε⁰, 1 adds the ε² term.
    """
    if branch not in ("A", "B"):
        raise DomainError("branch must be 'A' or 'B'")
    with mp.workdps(prec + 10):
        e, Xv = to_mpf(eps), to_mpf(X)
        if Xv <= 0:
            raise DomainError("branches need X > 0")
        sgn = -1 if branch == "A" else 1     # (−1)^n
        L = mpmath.log
        v = _gp_common(e, Xv) + (L(2) + 12 * zeta_prime_minus_one(prec)) / 6
        v -= ((1 + 3 * sgn) * L(Xv) + (1 - 3 * sgn) * L(1 + Xv)) / 24
        if order >= 1:
            v -= e ** 2 / 480 * ((15 * sgn + 1) / Xv ** 2 + (1 - 15 * sgn) / (Xv + 1) ** 2 + 14)
        return +v


def branch_difference_constant(X, prec: int = DEFAULT_PREC):
    """ε⁰ part of A − B for the gaussian Penner model."""
    with mp.workdps(prec + 10):
        e = mpmath.mpf(1)
        return gp_branch("A", e, X, 0, prec) - gp_branch("B", e, X, 0, prec)


@dataclass(frozen=True)
class Figure1Row:
    n: int
    X: Fraction
    F_exact: object
    A: object
    B: object

    @property
    def nearest(self):
        if self.A is None:
            return None
        return "A" if abs(self.F_exact - self.A) < abs(self.F_exact - self.B) else "B"

    @property
    def own_residual(self):
        if self.A is None:
            return None
        return abs(self.F_exact - (self.A if self.n % 2 else self.B))


def figure1_data(N: int, n_max: int, branch_order: int = 1, prec: int = DEFAULT_PREC):
    """Rows (n, X, F_exact, A(1/N, X), B(1/N, X)) for the gaussian Penner model."""
    from .solvable import gaussian_penner_exact
    if not isinstance(N, int) or N <= 0:
        raise DomainError("N must be a positive integer")
    rows = []
    eps = Fraction(1, N)
    for n in range(n_max + 1):
        F = gaussian_penner_exact(n, N, prec=prec).logZ
        X = Fraction(n, N)
        if n == 0:
            rows.append(Figure1Row(n, X, F, None, None))
            continue
        rows.append(Figure1Row(n, X, F, gp_branch("A", eps, X, branch_order, prec),
                               gp_branch("B", eps, X, branch_order, prec)))
    return rows


def telescoping_defect(n: int, N, prec: int = DEFAULT_PREC):
    """log Z_{2n+3} + log Z_{2n−1} − 2 log Z_{2n+1} − log(r_{2n+2} r²_{2n+1} r_{2n})
    for the gaussian Penner model, as an exact product (should be 1)."""
    from .exact import ExactProduct
    from .solvable import gaussian_penner_exact
    Z = lambda m: gaussian_penner_exact(m, N, prec=prec).Z  # noqa: E731
    r = lambda m: gaussian_penner_exact(m, N, prec=prec).r  # noqa: E731
    lhs = Z(2 * n + 3) * Z(2 * n - 1) / (Z(2 * n + 1) * Z(2 * n + 1))
    rhs = ExactProduct.rational(r(2 * n + 2) * r(2 * n + 1) ** 2 * r(2 * n))
    return lhs / rhs


__all__ = [
    "TwoCutPlanar", "TwoCutExpansion", "Figure1Row", "twocut_seed", "twocut_planar_solve",
    "twocut_planar_series", "twocut_residuals", "twocut_perturbative", "split_defect",
    "branch_free_energy", "gp_branch", "branch_difference_constant", "figure1_data",
    "telescoping_defect",
]
