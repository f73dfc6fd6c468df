"""Penner potentials W(z) = W₀(z) − Σ μᵢ log(z − qᵢ) with their contour."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ValidationError
from .numerics import parse_rational

HALF_LINE = "half_line"
REAL_LINE = "real_line"
INTERVAL01 = "interval01"
CONTOURS = (HALF_LINE, REAL_LINE, INTERVAL01)
CONTOUR_ENDS = {HALF_LINE: (Fraction(0), None), REAL_LINE: (None, None),
                INTERVAL01: (Fraction(0), Fraction(1))}

PRESETS = ("gaussian", "linear_penner", "gaussian_penner", "double_penner", "cubic_penner")


@dataclass(frozen=True)
class LogTerm:
    mu: Fraction
    q: tuple  # (re, im) as Fractions

    @property
    def is_real(self) -> bool:
        return self.q[1] == 0

    @property
    def qr(self) -> Fraction:
        return self.q[0]


@dataclass(frozen=True)
class Potential:
    """W₀(z) = Σ_{m≥1} poly[m−1] z^m plus logarithmic terms on a contour.

    For ``z2=True`` the log terms are stored in pairs: μ log(z² − q²) is the
    two entries (μ, q) and (μ, −q).
    """

    poly: tuple = ()
    logterms: tuple = ()
    contour: str = HALF_LINE
    z2: bool = False
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(Fraction(c) for c in self.poly))
        while self.poly and self.poly[-1] == 0:
            object.__setattr__(self, "poly", self.poly[:-1])
        lts = []
        for t in self.logterms:
            if not isinstance(t, LogTerm):
                mu, q = t
                if not isinstance(q, tuple):
                    q = (q, 0)
                t = LogTerm(Fraction(mu), (Fraction(q[0]), Fraction(q[1])))
            lts.append(t)
        object.__setattr__(self, "logterms", tuple(lts))
        validate(self)

    @property
    def degree(self) -> int:
        return len(self.poly)

    def w0_prime_coeffs(self):
        return w0_prime_coeffs(self)

    def pairs(self):
        """Distinct Z₂ pairs (μ, q) with q ≥ 0 (each pair counted once)."""
        if not self.z2:
            raise ValidationError("pairs() only applies to Z2-symmetric potentials")
        seen = []
        used = [False] * len(self.logterms)
        for i, t in enumerate(self.logterms):
            if used[i]:
                continue
            for j in range(i + 1, len(self.logterms)):
                u = self.logterms[j]
                if not used[j] and u.mu == t.mu and u.q == (-t.q[0], -t.q[1]):
                    used[i] = used[j] = True
                    seen.append((t.mu, (abs(t.q[0]), abs(t.q[1])) if t.q[1] == 0 else t.q))
                    break
        return seen

    def v_prime_coeffs(self):
        """Coefficients of V′(λ) where W₀(z) = V(z²) (Z₂ potentials)."""
        if not self.z2:
            raise ValidationError("V'(lambda) only defined for Z2-symmetric potentials")
        out = []
        for m in range(1, len(self.poly) // 2 + 1):
            out.append(m * self.poly[2 * m - 1])
        return out

    def to_config(self, N=None) -> dict:
        cfg = {
            "poly": [_rs(c) for c in self.poly],
            "logterms": [{"mu": _rs(t.mu), "q": [_rs(t.q[0]), _rs(t.q[1])]}
                         for t in self.logterms],
            "contour": self.contour,
            "z2": self.z2,
        }
        if N is not None:
            cfg["N"] = _rs(Fraction(N))
        return cfg


def _rs(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def w0_prime_coeffs(p: Potential):
    """Coefficients of W₀′(z) = Σ m c_m z^{m−1}."""
    return [m * c for m, c in enumerate(p.poly, start=1)]


def validate(p: Potential) -> None:
    if p.contour not in CONTOURS:
        raise ValidationError(
            f"unsupported contour {p.contour!r}; allowability of general contours needs an "
            "S-curve analysis and is not handled (supported: half_line, real_line, interval01)")
    for t in p.logterms:
        if t.mu == 0:
            raise ValidationError("log term with mu = 0")
        if t.is_real and _interior(p.contour, t.qr):
            if not (p.z2 and t.qr == 0):
                raise ValidationError(
                    f"log singularity q={t.qr} lies inside the {p.contour} contour")
    if p.z2:
        if p.contour != REAL_LINE:
            raise ValidationError("Z2-symmetric potentials need the real-line contour")
        if any(c != 0 for c in p.poly[0::2]):
            raise ValidationError("Z2-symmetric potential has an odd monomial")
        if len(p.logterms) % 2:
            raise ValidationError("Z2-symmetric potential has an unpaired log term")
        if len(p.pairs()) * 2 != len(p.logterms):
            raise ValidationError("Z2-symmetric potential has an unpaired log term")


def _interior(contour, q: Fraction) -> bool:
    lo, hi = CONTOUR_ENDS[contour]
    return (lo is None or q > lo) and (hi is None or q < hi)


# --------------------------------------------------------------- presets

def preset(name: str, mu0=None, mu1=None) -> Potential:
    """Named presets; double_penner takes μ₀, μ₁ (default 1, 1)."""
    h = Fraction(1, 2)
    if name == "gaussian":
        return Potential((0, h), (), REAL_LINE, True, name=name)
    if name == "linear_penner":
        return Potential((1,), ((1, 0),), HALF_LINE, name=name)
    if name == "gaussian_penner":
        return Potential((0, h), ((h, 0), (h, 0)), REAL_LINE, True, name=name)
    if name == "double_penner":
        mu0 = Fraction(1) if mu0 is None else Fraction(mu0)
        mu1 = Fraction(1) if mu1 is None else Fraction(mu1)
        if mu0 <= 0 or mu1 <= 0:
            raise ValidationError("double_penner needs mu0 > 0 and mu1 > 0")
        return Potential((), ((mu0, 0), (mu1, 1)), INTERVAL01, name=name)
    if name == "cubic_penner":
        return Potential((0, 0, Fraction(1, 3)), ((1, 0),), HALF_LINE, name=name)
    raise ValidationError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


# ----------------------------------------------------------- config I/O

def build_potential(cfg) -> Potential:
    """Potential from a parsed config mapping (or a preset name)."""
    if isinstance(cfg, str):
        return preset(cfg)
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object")
    if "preset" in cfg:
        params = cfg.get("params", {})
        return preset(cfg["preset"], *(parse_rational(params[k]) for k in ("mu0", "mu1")
                                         if k in params))
    unknown = set(cfg) - {"poly", "logterms", "contour", "z2", "N", "name"}
    if unknown:
        raise ValidationError(f"unknown config fields: {sorted(unknown)}")
    try:
        poly = tuple(parse_rational(c) for c in cfg.get("poly", []))
        lts = []
        for t in cfg.get("logterms", []):
            q = t.get("q", ["0", "0"])
            if len(q) != 2:
                raise ValidationError("q must be [re, im]")
            lts.append((parse_rational(t["mu"]), (parse_rational(q[0]), parse_rational(q[1]))))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed config: {exc}") from None
    z2 = cfg.get("z2", False)
    if not isinstance(z2, bool):
        raise ValidationError("z2 must be a boolean")
    return Potential(poly, tuple(lts), cfg.get("contour", HALF_LINE), z2,
                     name=cfg.get("name", "custom"))


def load_config(path):
    """Read a JSON config file; returns (Potential, N or None)."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: {exc}") from None
    p = build_potential(data)
    N = parse_rational(data["N"]) if isinstance(data, dict) and "N" in data else None
    return p, N


def serialize(p: Potential, N=None) -> str:
    return json.dumps(p.to_config(N), sort_keys=True)
