"""Double-exponential quadrature against the weight e^{−N W(x)} on a contour.

Finite pieces use tanh-sinh, semi-infinite pieces exp-sinh.  Pieces are split
at log singularities and at the weight maximum.  Node values (weight times
Jacobian) are cached per refinement level, so many integrands (all moments,
all resolvent components) share one weight evaluation per node.
"""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import IntegrabilityError, PrecisionError, ProximityError
from .model import HALF_LINE, INTERVAL01, REAL_LINE, Potential
from .numerics import to_mpf

MAX_LEVEL = 14


class _Piece:
    """Map t ∈ ℝ onto [a, b] (finite) or [a, a + sign·∞)."""

    def __init__(self, a, b=None, direction=1, scale=1.0):
        self.a = a
        self.b = b
        self.dir = direction
        self.scale = scale

    def node(self, t):
        """Return (x, dx/dt, distance-to-a, distance-to-b)."""
        hp = mpmath.pi / 2
        u = hp * mpmath.sinh(t)
        if self.b is not None:
            half = (self.b - self.a) / 2
            e = mpmath.exp(-2 * abs(u))
            # distance from the nearer endpoint computed without cancellation
            near = (self.b - self.a) * e / (1 + e)
            if u < 0:
                da, db = near, (self.b - self.a) - near
            else:
                da, db = (self.b - self.a) - near, near
            x = self.a + da if u < 0 else self.b - db
            dxdt = half * hp * mpmath.cosh(t) / mpmath.cosh(u) ** 2
            return x, dxdt, da, db
        g = self.scale * mpmath.exp(u)
        x = self.a + self.dir * g
        dxdt = g * hp * mpmath.cosh(t)
        return x, dxdt, g, None


class WeightQuadrature:
    """Integrals ∫_γ e^{−N W(x)} f(x) dx for a validated real-contour potential."""

    def __init__(self, p: Potential, N, prec: int):
        self.p = p
        self.N = N
        self.prec = prec
        self.wp = prec + 15
        self._cache: dict = {}
        with mp.workdps(self.wp):
            self.Nm = to_mpf(N)
            self.poly = [to_mpf(c) for c in p.poly]
            self.logs = []
            for t in p.logterms:
                q = mpmath.mpc(to_mpf(t.q[0]), to_mpf(t.q[1])) if t.q[1] else to_mpf(t.q[0])
                self.logs.append((to_mpf(t.mu) * self.Nm, q))
        self._check_integrable()
        self.pieces = self._build_pieces()

    # ---------------------------------------------------------- weight
    def _check_integrable(self):
        p = self.p
        for t in p.logterms:
            if t.is_real and t.q[0] in self._endpoints() and t.mu * self.N <= -1:
                raise IntegrabilityError(f"weight ~|x-{t.q[0]}|^{t.mu * self.N} diverges")
        if p.contour in (HALF_LINE, REAL_LINE):
            if not p.poly or p.poly[-1] <= 0 or (p.contour == REAL_LINE and len(p.poly) % 2):
                raise IntegrabilityError("weight does not decay at infinity on this contour")

    def _endpoints(self):
        if self.p.contour == HALF_LINE:
            return [Fraction(0)]
        if self.p.contour == INTERVAL01:
            return [Fraction(0), Fraction(1)]
        return []

    def log_weight(self, x, dists=None, shift=None):
        """log of e^{−N W0(x)} Π |x − q|^{μN} (complex for complex q).

        ``shift`` maps a log-term index to an extra power of |x − q|; the
        distances in ``dists`` (index → |x − q|) are used when supplied so
        that endpoint factors keep full relative accuracy.
        """
        acc = -self.Nm * mpmath.polyval(list(reversed([mpmath.mpf(0)] + self.poly)), x)
        for i, (a, q) in enumerate(self.logs):
            e = a + (shift.get(i, 0) if shift else 0)
            if e == 0:
                continue
            if isinstance(q, mpmath.mpc):
                acc = acc + e * mpmath.log(x - q)
                continue
            d = dists.get(i) if dists else None
            if d is None:
                d = abs(x - q)
            if d == 0:
                if e > 0:
                    return None  # weight vanishes
                raise ProximityError("integrand singular at a contour point")
            acc = acc + e * mpmath.log(d)
        return acc

    # ---------------------------------------------------------- pieces
    def _float_logw(self, x):
        v = -float(self.N) * sum(float(c) * x ** (m + 1) for m, c in enumerate(self.p.poly))
        for t in self.p.logterms:
            d = abs(complex(float(t.q[0]), float(t.q[1])) - x)
            if d == 0:
                return -math.inf
            v += float(t.mu) * float(self.N) * math.log(d)
        return v

    def _peak(self, lo, hi):
        """Approximate maximizer of the weight on [lo, hi] (float64)."""
        pts = []
        a = lo if lo is not None else -1e3
        b = hi if hi is not None else 1e3
        if lo is not None and hi is None:
            pts = [lo + 10 ** (k / 40) for k in range(-320, 161)]
        elif lo is None and hi is not None:
            pts = [hi - 10 ** (k / 40) for k in range(-320, 161)]
        else:
            pts = [a + (b - a) * k / 400 for k in range(1, 400)]
        best = max(pts, key=self._float_logw)
        # golden refinement in a bracket
        i = pts.index(best)
        left = pts[max(i - 1, 0)]
        right = pts[min(i + 1, len(pts) - 1)]
        if left > right:
            left, right = right, left
        g = (math.sqrt(5) - 1) / 2
        for _ in range(80):
            c1 = right - g * (right - left)
            c2 = left + g * (right - left)
            if self._float_logw(c1) > self._float_logw(c2):
                right = c2
            else:
                left = c1
        xp = (left + right) / 2
        h = max(abs(xp) * 1e-4, 1e-8)
        f0, fp, fm = self._float_logw(xp), self._float_logw(xp + h), self._float_logw(xp - h)
        curv = -(fp + fm - 2 * f0) / (h * h)
        width = 1 / math.sqrt(curv) if curv > 0 and math.isfinite(curv) else max(abs(xp), 1.0)
        return xp, width

    def _build_pieces(self):
        c = self.p.contour
        pieces = []
        with mp.workdps(self.wp):
            if c == INTERVAL01:
                xp, _ = self._peak(0.0, 1.0)
                cuts = [0.0] + ([xp] if 1e-6 < xp < 1 - 1e-6 else []) + [1.0]
                for a, b in zip(cuts, cuts[1:]):
                    pieces.append(_Piece(_exact_mpf(a), _exact_mpf(b)))
            elif c == HALF_LINE:
                pieces += self._semi(0.0, 1)
            else:
                pieces += self._semi(0.0, 1) + self._semi(0.0, -1)
        return pieces

    def _semi(self, a, direction):
        lo, hi = (a, None) if direction > 0 else (None, a)
        xp, width = self._peak(lo, hi)
        dist = abs(xp - a)
        if dist > 4 * width:
            mid = _exact_mpf(xp)
            return [_Piece(_exact_mpf(a), mid) if direction > 0 else _Piece(mid, _exact_mpf(a)),
                    _Piece(mid, None, direction, scale=mpmath.mpf(width))]
        return [_Piece(_exact_mpf(a), None, direction, scale=mpmath.mpf(max(dist, width)))]

    # ------------------------------------------------------ integration
    def _level_nodes(self, piece_idx, level, shift_key, shift):
        key = (piece_idx, level, shift_key)
        if key in self._cache:
            return self._cache[key]
        piece = self.pieces[piece_idx]
        h = mpmath.mpf(2) ** (-level)
        tmax = mpmath.log(4 / mpmath.pi * (self.wp * mpmath.log(10) + 30))
        kmax = int(tmax / h) + 1
        ks = range(-kmax, kmax + 1) if level == 0 else range(-kmax + (kmax + 1) % 2, kmax + 1, 2)
        nodes = []
        cutoff = -(self.wp + 20) * mpmath.log(10)
        for k in ks:
            if level > 0 and k % 2 == 0:
                continue
            t = k * h
            x, dxdt, da, db = piece.node(t)
            dists = self._dists(piece, da, db)
            lw = self.log_weight(x, dists, shift)
            if lw is None:
                continue
            if mpmath.re(lw) + mpmath.log(dxdt) < cutoff - 40 * abs(mpmath.log(abs(x) + 1)):
                continue
            wt = mpmath.exp(lw) * dxdt * h
            if shift:
                wt *= self._shift_sign(x, shift)
            nodes.append((x, wt))
        self._cache[key] = nodes
        return nodes

    def _dists(self, piece, da, db):
        out = {}
        for i, (_, q) in enumerate(self.logs):
            if isinstance(q, mpmath.mpc):
                continue
            if q == piece.a and da is not None:
                out[i] = da
            elif piece.b is not None and q == piece.b and db is not None:
                out[i] = db
        return out

    def _shift_sign(self, x, shift):
        # each index with power -1 stands for 1/(q - x) = sign(q - x)/|q - x|
        s = 1
        for i, e in shift.items():
            q = self.logs[i][1]
            if e % 2 and x > q:
                s = -s
        return s

    def integrate(self, func, size, shift=None, tol=None):
        """Vector integral Σ_pieces ∫ w(x) func(x)[j] dx, j < size.

        ``shift`` (log-term index → integer power) multiplies the weight by
        (q − x)^power, which is how resolvents at contour endpoints are taken.
        """
        shift = dict(shift or {})
        skey = tuple(sorted(shift.items()))
        with mp.workdps(self.wp):
            tol = mpmath.mpf(10) ** (-(self.prec + 10)) if tol is None else tol
            prev = None
            sums = [[mpmath.mpf(0)] * size for _ in self.pieces]
            for level in range(MAX_LEVEL + 1):
                cur = []
                for pi in range(len(self.pieces)):
                    acc = sums[pi]
                    if level > 0:
                        acc = [v / 2 for v in acc]
                    nodes = self._level_nodes(pi, level, skey, shift)
                    for x, wt in nodes:
                        fx = func(x)
                        for j in range(size):
                            acc[j] += wt * fx[j]
                    sums[pi] = acc
                    cur.append(acc)
                total = [mpmath.fsum(c[j] for c in cur) for j in range(size)]
                if prev is not None:
                    err = max(abs(total[j] - prev[j]) for j in range(size))
                    scale = max(max(abs(v) for v in total), mpmath.mpf(10) ** (-self.wp))
                    if err <= tol * scale and level >= 3:
                        return total, err
                prev = total
        raise PrecisionError("quadrature did not reach the requested tolerance")


def _exact_mpf(v):
    return mpmath.mpf(v)
