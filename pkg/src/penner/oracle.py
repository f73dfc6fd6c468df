"""Ground truth from the weight itself.

Moments of e^{−N W} → Chebyshev algorithm → (h_n, r_n, s_n), products for
Z_n, resolvents R_n(z), T_n(z) by two independent routes, and residuals of
the string equations and resolvent identities.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp

from .errors import (ConsistencyError, DegeneracyError, PrecisionError, ProximityError,
                     UnsupportedFormError, ValidationError)
from .exact import ExactProduct
from .model import HALF_LINE, INTERVAL01, REAL_LINE, Potential
from .numerics import DEFAULT_PREC, FLOAT, RATIONAL, to_mpf
from .quadrature import WeightQuadrature
from .series import LaurentTail

MAX_TRIDIAG = 4096


# ------------------------------------------------------------ families

@dataclass(frozen=True)
class Family:
    """Classical weight recognized from the potential.

    kind ``laguerre``: x^a e^{−κx} on [0, ∞)           (params a, κ)
    kind ``hermite``:  |x|^e e^{−κx²} on ℝ              (params e, κ)
    kind ``jacobi``:   x^a (1−x)^b on [0, 1]            (params a, b)
    kind ``freud_half``/``freud_even``: monomial x^d generalizations
    (float closed form only; params a or e, κ, d).
    """

    kind: str
    params: tuple


def classical_family(p: Potential, N) -> Family | None:
    if any(not t.is_real for t in p.logterms):
        return None
    at = {}
    for t in p.logterms:
        at[t.qr] = at.get(t.qr, 0) + t.mu * N
    if set(at) - {0, 1}:
        return None
    nz = [m for m, c in enumerate(p.poly, start=1) if c != 0]
    if p.contour == HALF_LINE and set(at) <= {0}:
        if len(nz) == 1:
            d = nz[0]
            kappa = N * p.poly[d - 1]
            a = at.get(0, Fraction(0))
            if d == 1:
                return Family("laguerre", (a, kappa))
            return Family("freud_half", (a, kappa, d))
    if p.contour == REAL_LINE and p.z2 and set(at) <= {0} and len(nz) == 1:
        d = nz[0]
        kappa = N * p.poly[d - 1]
        e = at.get(0, Fraction(0))
        if d == 2:
            return Family("hermite", (e, kappa))
        return Family("freud_even", (e, kappa, d))
    if p.contour == INTERVAL01 and not p.poly:
        return Family("jacobi", (at.get(0, Fraction(0)), at.get(1, Fraction(0))))
    return None


def _check_family_integrable(fam: Family):
    k = fam.kind
    if k in ("laguerre", "freud_half", "jacobi") and fam.params[0] <= -1:
        raise_integrability(fam.params[0])
    if k == "jacobi" and fam.params[1] <= -1:
        raise_integrability(fam.params[1])
    if k in ("hermite", "freud_even") and fam.params[0] <= -1:
        raise_integrability(fam.params[0])
    if k != "jacobi" and fam.params[1] <= 0:
        from .errors import IntegrabilityError
        raise IntegrabilityError("weight does not decay at infinity")


def raise_integrability(e):
    from .errors import IntegrabilityError
    raise IntegrabilityError(f"endpoint exponent {e} <= -1: the moment integrals diverge")


# ------------------------------------------------------------- moments

@dataclass(frozen=True)
class MomentTable:
    """m_k = factor · m[k] (exact) or m_k = m[k] (float)."""

    N: object
    m: tuple
    backend: str
    factor: ExactProduct | None
    potential: Potential
    prec: int = DEFAULT_PREC
    method: str = "closed"

    def moment(self, k):
        if self.backend == RATIONAL:
            return self.factor * self.m[k]
        return self.m[k]


def _exact_moments(fam: Family, k_max: int):
    if fam.kind == "laguerre":
        a, kappa = fam.params
        factor = ExactProduct.gamma(a + 1) / ExactProduct.power(kappa, a + 1)
        ratios, c = [], Fraction(1)
        for k in range(k_max + 1):
            ratios.append(c)
            c = c * (a + 1 + k) / kappa
        return factor, ratios
    if fam.kind == "hermite":
        e, kappa = fam.params
        b = (e + 1) / 2
        factor = ExactProduct.gamma(b) / ExactProduct.power(kappa, b)
        ratios, c = [], Fraction(1)
        for k in range(k_max + 1):
            if k % 2:
                ratios.append(Fraction(0))
            else:
                ratios.append(c)
                c = c * (b + k // 2) / kappa
        return factor, ratios
    if fam.kind == "jacobi":
        a, b = fam.params
        factor = (ExactProduct.gamma(a + 1) * ExactProduct.gamma(b + 1)
                  / ExactProduct.gamma(a + b + 2))
        ratios, c = [], Fraction(1)
        for k in range(k_max + 1):
            ratios.append(c)
            c = c * (a + 1 + k) / (a + b + 2 + k)
        return factor, ratios
    raise UnsupportedFormError(f"no exact moments for the {fam.kind} weight")


def _float_moments(fam: Family, k_max: int):
    g = mpmath.gamma
    if fam.kind in ("laguerre", "freud_half"):
        a, kappa = map(to_mpf, fam.params[:2])
        d = fam.params[2] if fam.kind == "freud_half" else 1
        return [g((a + k + 1) / d) / (d * kappa ** ((a + k + 1) / d)) for k in range(k_max + 1)]
    if fam.kind in ("hermite", "freud_even"):
        e, kappa = map(to_mpf, fam.params[:2])
        d = fam.params[2] if fam.kind == "freud_even" else 2
        return [mpmath.mpf(0) if k % 2 else
                2 * g((e + k + 1) / d) / (d * kappa ** ((e + k + 1) / d)) for k in range(k_max + 1)]
    a, b = map(to_mpf, fam.params)
    return [mpmath.beta(a + k + 1, b + 1) for k in range(k_max + 1)]


@lru_cache(maxsize=64)
def _quadrature(p: Potential, N, prec: int) -> WeightQuadrature:
    return WeightQuadrature(p, N, prec)


def compute_moments(p: Potential, N, k_max: int, backend: str = RATIONAL,
                    prec: int = DEFAULT_PREC, method: str = "auto") -> MomentTable:
    """Moments m_0..m_{k_max} of the weight e^{−N W} on the contour.

    ``method``: ``auto`` (closed form when the weight is classical, else
    quadrature), ``closed`` or ``quadrature``.
    """
    if k_max < 0:
        raise ValidationError("k_max must be nonnegative")
    fam = classical_family(p, Fraction(N)) if not isinstance(N, mpmath.mpf) else None
    if fam is not None:
        _check_family_integrable(fam)
    if backend == RATIONAL:
        if fam is None or fam.kind.startswith("freud"):
            raise UnsupportedFormError(
                "the rational backend needs a Laguerre, Hermite or Jacobi type weight")
        factor, ratios = _exact_moments(fam, k_max)
        return MomentTable(Fraction(N), tuple(ratios), RATIONAL, factor, p, prec, "closed")
    if backend != FLOAT:
        raise ValidationError(f"unknown backend {backend!r}")
    if method == "closed" and fam is None:
        raise UnsupportedFormError("no closed-form moments for this potential")
    with mp.workdps(prec + 10):
        if fam is not None and method in ("auto", "closed"):
            vals = _float_moments(fam, k_max)
            used = "closed"
        else:
            q = _quadrature(p, N, prec)
            vals, _ = q.integrate(lambda x: [x ** k for k in range(k_max + 1)], k_max + 1)
            if p.z2:
                vals = [mpmath.mpf(0) if k % 2 else v for k, v in enumerate(vals)]
            used = "quadrature"
    return MomentTable(N, tuple(vals), FLOAT, None, p, prec, used)


# ---------------------------------------------------------- recurrence

@dataclass(frozen=True)
class RecurrenceTable:
    """h_0..h_n, r_0..r_n (r_0 = 0), s_0..s_n for one N."""

    N: object
    h: tuple
    r: tuple
    s: tuple
    backend: str
    potential: Potential | None = None
    prec: int = DEFAULT_PREC

    @property
    def n_max(self) -> int:
        return len(self.s) - 1


def _chebyshev(mu, n):
    """Gautschi's Chebyshev algorithm: (σ_kk, α_k, β_k) for k < n."""
    if len(mu) < 2 * n:
        raise ValidationError(f"need {2 * n} moments, have {len(mu)}")
    zero = mu[0] * 0
    sig_prev = [zero] * (2 * n)
    sig = list(mu[:2 * n])
    if sig[0] == 0:
        raise DegeneracyError("vanishing zeroth moment")
    alpha = [sig[1] / sig[0]]
    beta = [sig[0]]
    diag = [sig[0]]
    for k in range(1, n):
        new = [zero] * (2 * n)
        for l in range(k, 2 * n - k):
            new[l] = sig[l + 1] - alpha[k - 1] * sig[l] - beta[k - 1] * sig_prev[l]
        if new[k] == 0:
            raise DegeneracyError(f"Hankel determinant vanishes at order {k}")
        alpha.append(new[k + 1] / new[k] - sig[k] / sig[k - 1])
        beta.append(new[k] / sig[k - 1])
        diag.append(new[k])
        sig_prev, sig = sig, new
    return diag, alpha, beta


def recurrence_from_moments(mt: MomentTable, n_max: int) -> RecurrenceTable:
    """(h, r, s) up to index n_max; needs moments m_0..m_{2 n_max + 1}."""
    K = n_max + 1
    if mt.backend == RATIONAL:
        diag, alpha, beta = _chebyshev(list(mt.m), K)
        h = tuple(mt.factor * d for d in diag)
        r = (Fraction(0),) + tuple(beta[1:])
        return RecurrenceTable(mt.N, h, r, tuple(alpha), RATIONAL, mt.potential, mt.prec)
    with mp.workdps(mp.dps):
        diag, alpha, beta = _chebyshev(list(mt.m), K)
    r = (mpmath.mpf(0),) + tuple(beta[1:])
    return RecurrenceTable(mt.N, tuple(diag), r, tuple(alpha), FLOAT, mt.potential, mt.prec)


def _max_rel_diff(a: RecurrenceTable, b: RecurrenceTable):
    worst = mpmath.mpf(0)
    for xs, ys in ((a.h, b.h), (a.r, b.r), (a.s, b.s)):
        for x, y in zip(xs, ys):
            scale = max(abs(y), mpmath.mpf(1) if xs is not a.h else abs(y))
            if scale:
                worst = max(worst, abs(x - y) / scale)
    return worst


def recurrence_table(p: Potential, N, n_max: int, backend: str = RATIONAL,
                     prec: int = DEFAULT_PREC, method: str = "auto") -> RecurrenceTable:
    """Recurrence coefficients from moments.

    In the float backend the Chebyshev step loses digits with n, so moments
    are recomputed at two working precisions and the run is repeated with
    more guard digits until both agree to 10^{-(prec+5)}.
    """
    if backend == RATIONAL:
        return recurrence_from_moments(compute_moments(p, N, 2 * n_max + 1, RATIONAL), n_max)
    return _float_table(p, N, n_max, prec, method)


@lru_cache(maxsize=128)
def _float_table(p, N, n_max, prec, method):
    guard = 10 + 2 * n_max
    for _ in range(8):
        tabs = []
        for wp in (prec + guard, prec + guard + 15):
            with mp.workdps(wp):
                mt = compute_moments(p, N, 2 * n_max + 1, FLOAT, wp, method)
                tabs.append(recurrence_from_moments(mt, n_max))
        with mp.workdps(prec + guard + 15):
            if _max_rel_diff(tabs[0], tabs[1]) < mpmath.mpf(10) ** (-(prec + 5)):
                t = tabs[1]
                return RecurrenceTable(N, t.h, t.r, t.s, FLOAT, p, prec)
        guard *= 2
    raise PrecisionError("recurrence coefficients did not stabilize under precision increase")


def eval_polys(rt: RecurrenceTable, x, n: int):
    """Monic P_0(x)..P_n(x) from P_{k+1} = (x − s_k)P_k − r_k P_{k−1}."""
    if n > rt.n_max + 1:
        raise ValidationError(f"table reaches P_{rt.n_max + 1}, asked for P_{n}")
    out = [x * 0 + 1]
    prev = x * 0
    for k in range(n):
        nxt = (x - rt.s[k]) * out[-1] - rt.r[k] * prev
        prev = out[-1]
        out.append(nxt)
    return out


def _positive_weight(p: Potential) -> bool:
    return all(t.is_real for t in p.logterms)


def partition_function(rt: RecurrenceTable, n: int):
    """Z_n = h_0^n Π_{k<n} r_k^{n−k} (ExactProduct in the rational backend)."""
    if n < 0 or n > rt.n_max + 1:
        raise ValidationError(f"n={n} outside the table")
    if n == 0:
        return ExactProduct(1) if rt.backend == RATIONAL else mpmath.mpf(1)
    out = rt.h[0] ** n
    for k in range(1, n):
        out = out * rt.r[k] ** (n - k)
    return out


def log_partition(rt: RecurrenceTable, n: int, prec: int | None = None):
    """log Z_n = n log h_0 + Σ_{k=1}^{n−1} (n−k) log r_k."""
    if n < 0 or n > rt.n_max + 1:
        raise ValidationError(f"n={n} outside the table")
    prec = prec or rt.prec
    if n == 0:
        return mpmath.mpf(0)
    check = rt.potential is None or _positive_weight(rt.potential)
    with mp.workdps(prec + 10):
        if rt.backend == RATIONAL:
            vals = [rt.h[0].value(prec)] + [to_mpf(v) for v in rt.r[1:n]]
        else:
            vals = [rt.h[0]] + list(rt.r[1:n])
        if check and any(v <= 0 for v in vals):
            raise ConsistencyError("nonpositive h_0 or r_k for a positive weight")
        acc = n * mpmath.log(vals[0])
        for k in range(1, n):
            acc += (n - k) * mpmath.log(vals[k])
        return +acc


# ----------------------------------------------------------- resolvents

@dataclass(frozen=True)
class ResolventPair:
    z: object
    n: int
    R: object
    T: object


def contour_distance(p: Potential, z):
    z = mpmath.mpc(z)
    x, y = z.real, z.imag
    if p.contour == REAL_LINE:
        return abs(y)
    if p.contour == HALF_LINE:
        return abs(y) if x >= 0 else abs(z)
    if x < 0:
        return abs(z)
    if x > 1:
        return abs(z - 1)
    return abs(y)


_TEST_POINTS = {
    REAL_LINE: (4j, 3 + 4j, -2 + 5j, 1 + 6j, -5 + 3j),
    HALF_LINE: (-3, -2 + 2j, -3 + 4j, -1 + 5j, 6j),
    INTERVAL01: (-1, 2, 0.5 + 1j, -0.5 + 0.5j, 1.5 - 0.5j),
}


def off_contour_points(p: Potential):
    """Five evaluation points well away from the contour (the truncated
    Jacobi-matrix path converges slowly close to an unbounded support)."""
    return [mpmath.mpc(z) for z in _TEST_POINTS[p.contour]]


def _endpoint_index(p: Potential, N, z):
    """Index of a log term sitting exactly at z with μN > 0, else None."""
    if isinstance(z, (complex, mpmath.mpc)) and mpmath.mpc(z).imag != 0:
        return None
    for i, t in enumerate(p.logterms):
        if t.is_real and t.mu * N > 0 and to_mpf(t.qr) == mpmath.mpf(mpmath.re(z)):
            return i
    return None


def resolvents_quadrature(rt: RecurrenceTable, p: Potential, N, z, n_max: int,
                          prec: int = DEFAULT_PREC):
    """R_0..R_{n_max} and T_0..T_{n_max+1} from the Stieltjes integrals.

    R_n = (1/h_n)∫ w P_n²/(z−ζ) and T_n = 1 + (2/h_{n−1})∫ w P_n P_{n−1}/(z−ζ).
    At a contour endpoint carrying a log term with μN > 0 the factor
    1/(z−ζ) is absorbed into the weight exponent instead.
    """
    if n_max + 1 > rt.n_max + 1:
        raise ValidationError("recurrence table too short")
    shift = None
    idx = _endpoint_index(p, N, z)
    wp = prec + 15
    with mp.workdps(wp):
        if idx is not None:
            shift = {idx: -1}
            zz = None
        else:
            zz = mpmath.mpc(z)
            if contour_distance(p, zz) < mpmath.mpf(10) ** -8 * (1 + abs(zz)):
                raise ProximityError(f"z={z} lies on or too close to the {p.contour} contour")
        table = rt if rt.backend == FLOAT else _to_float_table(rt, wp)
        size = 2 * n_max + 2

        def integrand(x):
            P = eval_polys(table, x, n_max + 1)
            k = 1 if zz is None else 1 / (zz - x)
            return [P[j] * P[j] * k for j in range(n_max + 1)] + \
                   [P[j] * P[j - 1] * k for j in range(1, n_max + 2)]

        vals, _ = _quadrature(p, N, prec).integrate(integrand, size, shift=shift)
        R = [vals[j] / table.h[j] for j in range(n_max + 1)]
        T = [mpmath.mpf(1)] + [1 + 2 * vals[n_max + j] / table.h[j - 1]
                               for j in range(1, n_max + 2)]
        if p.z2 and zz is None:
            # the symmetric principal value of the odd parts vanishes identically
            pass
        return R, T


def _to_float_table(rt: RecurrenceTable, wp):
    with mp.workdps(wp):
        h = tuple(v.value(wp) if isinstance(v, ExactProduct) else to_mpf(v) for v in rt.h)
        return RecurrenceTable(rt.N, h, tuple(to_mpf(v) for v in rt.r),
                               tuple(to_mpf(v) for v in rt.s), FLOAT, rt.potential, wp)


def classical_recurrence(fam: Family, M: int):
    """Textbook (r_k, s_k), k ≤ M, for the Laguerre/Hermite/Jacobi families."""
    r, s = [Fraction(0)], []
    if fam.kind == "laguerre":
        a, kap = fam.params
        for k in range(M + 1):
            s.append((2 * k + a + 1) / kap)
            if k:
                r.append(k * (k + a) / kap ** 2)
    elif fam.kind == "hermite":
        e, kap = fam.params
        for k in range(M + 1):
            s.append(Fraction(0))
            if k:
                r.append((k + (e if k % 2 else 0)) / (2 * kap))
    elif fam.kind == "jacobi":
        a, b = fam.params
        S = a + b
        for k in range(M + 1):
            s.append((2 * k * k + 2 * k * (S + 1) + S * (a + 1)) / ((2 * k + S) * (2 * k + S + 2)))
            if k:
                m = 2 * k + S
                r.append(k * (k + a) * (k + b) * (k + S) / (m * m * (m - 1) * (m + 1)))
    else:
        raise UnsupportedFormError(f"no textbook recurrence for {fam.kind}")
    return r, s


def jacobi_entries(p: Potential, N, M: int, prec: int):
    """(r_0..r_M, s_0..s_M) for the truncated-matrix path."""
    fam = classical_family(p, Fraction(N)) if not isinstance(N, mpmath.mpf) else None
    if fam is not None and fam.kind in ("laguerre", "hermite", "jacobi"):
        r, s = classical_recurrence(fam, M)
        return [to_mpf(v) for v in r], [to_mpf(v) for v in s]
    t = recurrence_table(p, N, M, FLOAT, prec)
    return list(t.r), list(t.s)


def _tridiag_resolvents(r, s, z, n_max, M):
    # θ_i = det of the leading (i+1)-block of z − L, φ_i of the trailing block from i
    theta = [mpmath.mpc(0), mpmath.mpc(1)]  # θ_{-2}, θ_{-1}
    for i in range(M):
        theta.append((z - s[i]) * theta[-1] - r[i] * theta[-2])
    phi = [mpmath.mpc(0)] * (M + 2)
    phi[M] = mpmath.mpc(1)
    for i in range(M - 1, -1, -1):
        phi[i] = (z - s[i]) * phi[i + 1] - (r[i + 1] if i + 1 < M else 0) * phi[i + 2]
    det = theta[M + 1]
    if det == 0:
        raise DegeneracyError("truncated Jacobi matrix is singular at z")
    th = lambda i: theta[i + 2]  # noqa: E731
    R = [th(n - 1) * phi[n + 1] / det for n in range(n_max + 1)]
    T = [mpmath.mpc(1)] + [1 + 2 * r[n] * th(n - 2) * phi[n + 1] / det for n in range(1, n_max + 2)]
    return R, T


def resolvents_tridiagonal(p: Potential, N, z, n_max: int, prec: int = DEFAULT_PREC):
    """Same quantities from ((z − L_M)^{-1}) with M doubled until stable."""
    wp = prec + 20
    with mp.workdps(wp):
        zz = mpmath.mpc(z)
        if contour_distance(p, zz) < mpmath.mpf(10) ** -8 * (1 + abs(zz)):
            raise ProximityError(f"z={z} lies on or too close to the {p.contour} contour")
        tol = mpmath.mpf(10) ** (-(prec + 5))
        M = max(32, 4 * (n_max + 2))
        prev = None
        while M <= MAX_TRIDIAG:
            r, s = jacobi_entries(p, N, M, prec)
            cur = _tridiag_resolvents(r, s, zz, n_max, M)
            if prev is not None:
                diff = max(abs(a - b) for xs, ys in zip(cur, prev) for a, b in zip(xs, ys))
                if diff < tol:
                    return cur
            prev = cur
            M *= 2
    raise PrecisionError("truncated resolvent did not converge; move z away from the contour")


def resolvents(rt: RecurrenceTable, p: Potential, N, z, n_max: int,
               method: str = "quadrature", prec: int = DEFAULT_PREC):
    if method == "quadrature":
        return resolvents_quadrature(rt, p, N, z, n_max, prec)
    if method == "tridiagonal":
        return resolvents_tridiagonal(p, N, z, n_max, prec)
    raise ValidationError(f"unknown resolvent method {method!r}")


def resolvent_rt(rt: RecurrenceTable, p: Potential, N, n: int, z,
                 method: str = "quadrature", prec: int = DEFAULT_PREC) -> ResolventPair:
    R, T = resolvents(rt, p, N, z, n, method, prec)
    return ResolventPair(z, n, R[n], T[n])


def identity_residuals(prev: ResolventPair | None, cur: ResolventPair, nxt: ResolventPair,
                       rt: RecurrenceTable, z):
    """(|T_n² − 4 r_n R_n R_{n−1} − 1|, |2(z − s_n)R_n − T_{n+1} − T_n|)."""
    n = cur.n
    rn = rt.r[n] if n else 0
    Rm = prev.R if prev is not None else 0
    res1 = abs(cur.T * cur.T - 4 * rn * cur.R * Rm - 1)
    res2 = abs(2 * (z - rt.s[n]) * cur.R - nxt.T - cur.T)
    return res1, res2


def identity_residual_table(R, T, rt: RecurrenceTable, z, n_max: int):
    """Max rid1/rid2 residuals over n = 0..n_max from resolvent lists."""
    worst1 = worst2 = 0
    for n in range(n_max + 1):
        pm = ResolventPair(z, n - 1, R[n - 1], T[n - 1]) if n else None
        nx = ResolventPair(z, n + 1, R[n + 1] if n + 1 < len(R) else None, T[n + 1])
        a, b = identity_residuals(pm, ResolventPair(z, n, R[n], T[n]), nx, rt, z)
        worst1, worst2 = max(worst1, a), max(worst2, b)
    return worst1, worst2


# ------------------------------------------------------ endpoint values

def _stieltjes_exact(p: Potential, N, q: Fraction):
    """(1/h_0)∫ w/(q − ζ) for classical weights at a log-term endpoint."""
    fam = classical_family(p, Fraction(N))
    if fam is None:
        raise UnsupportedFormError("exact resolvents need a classical weight")
    if fam.kind == "laguerre" and q == 0:
        a, kap = fam.params
        if a <= 0:
            raise_integrability(a - 1)
        return -kap / a
    if fam.kind == "hermite" and q == 0:
        if fam.params[0] <= 0:
            raise_integrability(fam.params[0] - 1)
        return Fraction(0)
    if fam.kind == "jacobi" and q in (0, 1):
        a, b = fam.params
        if q == 0:
            if a <= 0:
                raise_integrability(a - 1)
            return -(a + b + 1) / a
        if b <= 0:
            raise_integrability(b - 1)
        return (a + b + 1) / b
    raise UnsupportedFormError(f"no exact resolvent at q={q} for this weight")


def exact_resolvents_at(rt: RecurrenceTable, p: Potential, N, q, n_max: int):
    """R_n(q), T_n(q) exactly by R_0 = S(q), T_0 = 1 and the identities.

    T_{n+1} = 2(q − s_n)R_n − T_n and R_{n+1} = (T_{n+1}² − 1)/(4 r_{n+1} R_n).
    """
    q = Fraction(q)
    R = [_stieltjes_exact(p, N, q)]
    T = [Fraction(1)]
    for n in range(n_max + 1):
        T.append(2 * (q - rt.s[n]) * R[n] - T[n])
        if n + 1 > n_max:
            break
        if R[n] == 0:
            if T[n + 1] ** 2 != 1:
                raise DegeneracyError("R_n(q) = 0 but T_{n+1}(q)^2 != 1")
            R.append(Fraction(0))
        else:
            R.append((T[n + 1] ** 2 - 1) / (4 * rt.r[n + 1] * R[n]))
    return R, T


def values_at(rt: RecurrenceTable, p: Potential, N, q, n_max: int, prec=DEFAULT_PREC):
    """R_n(q), T_n(q) in the backend of ``rt``."""
    if rt.backend == RATIONAL:
        return exact_resolvents_at(rt, p, N, q, n_max)
    return resolvents_quadrature(rt, p, N, q, n_max, prec)


# ------------------------------------------------- string equations

def jacobi_row_powers(rt: RecurrenceTable, n: int, kmax: int):
    """Rows e_n^T L^k for k = 0..kmax as dicts {column: value}."""
    rows = [{n: rt.r[0] * 0 + 1}]
    for _ in range(kmax):
        v = rows[-1]
        out = {}
        for j, c in v.items():
            # (vL)_{j+1} += v_j, (vL)_j += v_j s_j, (vL)_{j-1} += v_j r_j
            if j + 1 > rt.n_max or j > rt.n_max:
                raise ValidationError("recurrence table too short for the requested power")
            out[j + 1] = out.get(j + 1, 0) + c
            out[j] = out.get(j, 0) + c * rt.s[j]
            if j >= 1:
                out[j - 1] = out.get(j - 1, 0) + c * rt.r[j]
        rows.append(out)
    return rows


def laurent_tails(rt: RecurrenceTable, n: int, order: int):
    """1/z expansions of R_n and T_n to z^{−order} from powers of L."""
    rows = jacobi_row_powers(rt, n, order - 1)
    zero = rt.r[0] * 0
    Rt = [zero] + [rows[k].get(n, zero) for k in range(order)]
    Tt = [zero + 1] + [2 * rows[k].get(n - 1, zero) for k in range(order)]
    return LaurentTail(Rt), LaurentTail(Tt)


def string_residuals(rt: RecurrenceTable, p: Potential, N, n: int, prec=DEFAULT_PREC):
    """Deviations of the two string equations at index n.

    Z₂ potentials use the single reduced equation and return res2 = 0.
    """
    deg = p.degree
    if n < 1:
        raise ValidationError("string equations start at n = 1")
    for t in p.logterms:
        if t.is_real and t.mu * N <= 0:
            raise ValidationError("string equations need mu*N > 0 at every log term")
    Rtail, Ttail = laurent_tails(rt, n, max(deg, 1) + 1)
    exact = rt.backend == RATIONAL
    conv = (lambda v: v) if exact else to_mpf
    Nn = Fraction(N) if exact else to_mpf(N)
    with mp.workdps(prec + 15):
        if p.z2:
            acc = Ttail.residue_against(_z2_poly(p)) - Fraction(n) / Nn if exact else \
                Ttail.residue_against(_z2_poly(p)) - n / Nn
            for mu, q in p.pairs():
                T = _T_at(rt, p, N, q, n, prec)
                acc = acc + conv(mu) * (T - 1)
            return abs(acc), (Fraction(0) if exact else mpmath.mpf(0))
        w0p = [conv(c) for c in p.w0_prime_coeffs()]
        acc1 = Ttail.residue_against(w0p) - 2 * n / Nn
        acc2 = Rtail.residue_against(w0p)
        cache = {}
        for t in p.logterms:
            if t.q not in cache:
                cache[t.q] = _values(rt, p, N, t, n, prec)
            Rq, Tq = cache[t.q]
            acc1 = acc1 + conv(t.mu) * (Tq - 1)
            acc2 = acc2 + conv(t.mu) * Rq
        return abs(acc1), abs(acc2)


def _z2_poly(p):
    # Σ m c_{2m}·2(L^{2m−1})_{n,n−1} equals the residue of Σ m c_{2m} z^{2m−1} against T
    out = [0] * len(p.poly)
    for m, c in enumerate(p.v_prime_coeffs(), start=1):
        out[2 * m - 1] = c
    return out


def _values(rt, p, N, t, n, prec):
    if t.is_real:
        q = t.qr
    else:
        q = mpmath.mpc(to_mpf(t.q[0]), to_mpf(t.q[1]))
    R, T = values_at(rt, p, N, q, n, prec)
    return R[n], T[n]


def _T_at(rt, p, N, q, n, prec):
    if q[1] != 0:
        qq = mpmath.mpc(to_mpf(q[0]), to_mpf(q[1]))
        return resolvents_quadrature(rt, p, N, qq, n, prec)[1][n]
    R, T = values_at(rt, p, N, q[0], n, prec)
    return T[n]
