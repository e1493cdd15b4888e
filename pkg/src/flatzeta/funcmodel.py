"""Smooth model functions  f = v(x,y) x^a y^b + flat perturbations.

The representable family is

    f(x, y) = v(x, y) * x^a * y^b  +  sum_j y^j g_j(x)  +  sum_j x^j h_j(y)

with ``v`` a polynomial unit (nonzero constant term), ``0 <= j < b`` for the
g-terms, ``0 <= j < a`` for the h-terms, and every ``g_j``, ``h_j`` a flat
factor ``q(t) * exp(-|t|^-p)`` with a finite Laurent polynomial ``q``.  The
family is closed under partial differentiation, exact to evaluate, and rich
enough to contain every perturbation shape the theory distinguishes.

Derived objects: the quotient ``f / (x^a y^b)`` extended across the origin
(:func:`f_tilde`), the factor ``F`` with ``f = y^b F`` (:func:`F_part`), and
plateau bump/cutoff functions built from the standard exp(-1/t) smooth step.

All values are immutable after construction and every operation is a pure
function, so evaluation is safe from concurrent threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from . import jets
from .errors import FlatZetaError
from .quad import DEFAULT_CONFIG, QuadratureConfig

__all__ = [
    "FlatFactor",
    "Poly2",
    "PolyUnit",
    "SmoothModelFunction",
    "ModelExpr",
    "FTilde",
    "PlateauProfile",
    "BumpFunction",
    "UnsupportedCase",
    "evaluate",
    "partial",
    "classify",
    "f_tilde",
    "F_part",
    "check_ftilde_lower_bound",
    "check_F_derivative_bound",
]


class UnsupportedCase(FlatZetaError):
    """Operation defined only for a sub-family (e.g. needs empty g-terms)."""


def _normalize_laurent(pairs: Iterable[tuple[float, int]]) -> tuple[tuple[float, int], ...]:
    acc: dict[int, float] = {}
    for c, e in pairs:
        e = int(e)
        acc[e] = acc.get(e, 0.0) + float(c)
    return tuple(sorted(((c, e) for e, c in acc.items() if c != 0.0),
                        key=lambda ce: ce[1]))


@dataclass(frozen=True)
class FlatFactor:
    """q(t) * exp(-|t|^-p) for t != 0, and 0 at t = 0.

    ``laurent`` holds q as (coefficient, exponent) pairs with integer
    exponents of either sign.  The value is flat at t = 0: every derivative
    vanishes there.  The symbolic derivative below is the t > 0 branch
    (q' + p t^{-p-1} q); use :meth:`deriv_value` for sign-correct evaluation
    of derivatives on the whole line.
    """

    p: int
    laurent: tuple[tuple[float, int], ...]

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("flat exponent p must be a positive integer")
        object.__setattr__(self, "laurent", _normalize_laurent(self.laurent))

    @classmethod
    def pure(cls, p: int, coefficient: float = 1.0, exponent: int = 0) -> "FlatFactor":
        """coefficient * t^exponent * exp(-|t|^-p)."""
        return cls(p, ((coefficient, exponent),))

    def is_zero(self) -> bool:
        return not self.laurent

    def scale(self, c: float) -> "FlatFactor":
        return FlatFactor(self.p, tuple((c * ci, e) for ci, e in self.laurent))

    def shift(self, k: int) -> "FlatFactor":
        """Multiply by t^k."""
        return FlatFactor(self.p, tuple((ci, e + k) for ci, e in self.laurent))

    def reflect(self) -> "FlatFactor":
        """The factor t -> value(-t)."""
        return FlatFactor(self.p, tuple((ci * (-1.0) ** e, e) for ci, e in self.laurent))

    def derivative(self) -> "FlatFactor":
        """d/dt on t > 0: Laurent part q' + p t^(-p-1) q."""
        pairs = [(c * e, e - 1) for c, e in self.laurent if e != 0]
        pairs += [(self.p * c, e - self.p - 1) for c, e in self.laurent]
        return FlatFactor(self.p, tuple(pairs))

    def deriv(self, n: int) -> "FlatFactor":
        """n-th one-sided (t > 0) derivative, cached."""
        return _deriv_chain(self, n)

    def _laurent_eval(self, t):
        out = np.zeros_like(t, dtype=float)
        for c, e in self.laurent:
            out += c * t ** e
        return out

    def value(self, t):
        """Evaluate q(t) exp(-|t|^-p) with exact 0 at t = 0 (vectorized)."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.zeros(t.shape, dtype=float)
        # exp(-|t|^-p) underflows below |t| ~ 745^(-1/p); the value is 0 there
        floor = (745.0) ** (-1.0 / self.p)
        live = np.abs(t) > floor
        if np.any(live):
            tl = t[live]
            out[live] = self._laurent_eval(tl) * np.exp(-np.abs(tl) ** (-float(self.p)))
        return out[0] if scalar else out

    def deriv_value(self, n: int, t):
        """n-th derivative of the flat function, correct for every real t."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.zeros(t.shape, dtype=float)
        pos = t > 0
        neg = t < 0
        if np.any(pos):
            out[pos] = self.deriv(n).value(t[pos])
        if np.any(neg):
            out[neg] = (-1.0) ** n * self.reflect().deriv(n).value(-t[neg])
        return out[0] if scalar else out

    def jet(self, t0, m: int):
        """Normalized Taylor coefficients at base points t0 >= 0 (batched)."""
        t0 = np.atleast_1d(np.asarray(t0, dtype=float))
        out = np.zeros(t0.shape + (m,), dtype=float)
        fact = 1.0
        for k in range(m):
            out[..., k] = self.deriv_value(k, t0) / fact
            fact *= k + 1
        return out


_DERIV_CACHE: dict[tuple[FlatFactor, int], FlatFactor] = {}


def _deriv_chain(factor: FlatFactor, n: int) -> FlatFactor:
    if n == 0:
        return factor
    key = (factor, n)
    hit = _DERIV_CACHE.get(key)
    if hit is None:
        hit = _deriv_chain(factor, n - 1).derivative()
        _DERIV_CACHE[key] = hit
    return hit


@dataclass(frozen=True)
class Poly2:
    """Bivariate polynomial, coefficients keyed by (xdeg, ydeg)."""

    terms: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        acc: dict[tuple[int, int], float] = {}
        for a, b, c in self.terms:
            if a < 0 or b < 0:
                raise ValueError("polynomial exponents must be nonnegative")
            key = (int(a), int(b))
            acc[key] = acc.get(key, 0.0) + float(c)
        object.__setattr__(
            self, "terms",
            tuple(sorted((a, b, c) for (a, b), c in acc.items() if c != 0.0)))

    @classmethod
    def from_dict(cls, d) -> "Poly2":
        return cls(tuple((a, b, c) for (a, b), c in d.items()))

    @classmethod
    def constant(cls, c: float) -> "Poly2":
        return cls(((0, 0, c),))

    @cached_property
    def coeffs(self) -> dict[tuple[int, int], float]:
        return {(a, b): c for a, b, c in self.terms}

    def constant_term(self) -> float:
        return self.coeffs.get((0, 0), 0.0)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> set[tuple[int, int]]:
        return {(a, b) for a, b, _ in self.terms}

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=float)
        for a, b, c in self.terms:
            out += c * x ** a * y ** b
        return out[()] if out.ndim == 0 else out

    def partial(self, dx: int, dy: int) -> "Poly2":
        pairs = []
        for a, b, c in self.terms:
            if a < dx or b < dy:
                continue
            coef = c
            for i in range(dx):
                coef *= a - i
            for i in range(dy):
                coef *= b - i
            pairs.append((a - dx, b - dy, coef))
        return Poly2(tuple(pairs))

    def shift_monomial(self, a: int, b: int) -> "Poly2":
        """Multiply by x^a y^b."""
        return Poly2(tuple((i + a, j + b, c) for i, j, c in self.terms))

    def mul(self, other: "Poly2") -> "Poly2":
        pairs = []
        for a1, b1, c1 in self.terms:
            for a2, b2, c2 in other.terms:
                pairs.append((a1 + a2, b1 + b2, c1 * c2))
        return Poly2(tuple(pairs))

    def add(self, other: "Poly2") -> "Poly2":
        return Poly2(self.terms + other.terms)

    def restrict_y0(self) -> "Poly2":
        """The polynomial x -> p(x, 0), kept bivariate with ydeg 0."""
        return Poly2(tuple((a, 0, c) for a, b, c in self.terms if b == 0))

    def restrict_x0(self) -> "Poly2":
        return Poly2(tuple((0, b, c) for a, b, c in self.terms if a == 0))

    def jet2(self, x0, y0, m1: int, m2: int):
        """Bivariate Taylor coefficients at base points (batched)."""
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        y0 = np.atleast_1d(np.asarray(y0, dtype=float))
        shape = np.broadcast_shapes(x0.shape, y0.shape)
        out = np.zeros(shape + (m1, m2), dtype=float)
        for a, b, c in self.terms:
            for i in range(min(a, m1 - 1) + 1):
                bi = math.comb(a, i)
                xa = x0 ** (a - i)
                for j in range(min(b, m2 - 1) + 1):
                    out[..., i, j] += c * bi * math.comb(b, j) * xa * y0 ** (b - j)
        return out


def PolyUnit(coeffs) -> Poly2:
    """A polynomial with nonzero constant term (the unit factor v)."""
    poly = coeffs if isinstance(coeffs, Poly2) else Poly2.from_dict(coeffs)
    if poly.constant_term() == 0.0:
        raise ValueError("unit polynomial needs a nonzero constant term")
    return poly


@dataclass(frozen=True)
class ModelExpr:
    """Element of the differentiation-closed algebra around the model family.

    poly      -- plain bivariate polynomial part
    xterms    -- (j, factor, n): y^j times the n-th x-derivative of a flat factor in x
    yterms    -- (j, factor, n): x^j times the n-th y-derivative of a flat factor in y
    """

    poly: Poly2
    xterms: tuple[tuple[int, FlatFactor, int], ...] = ()
    yterms: tuple[tuple[int, FlatFactor, int], ...] = ()

    def evaluate(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=float)
        out += self.poly(x, y)
        for j, factor, n in self.xterms:
            out += y ** j * factor.deriv_value(n, x)
        for j, factor, n in self.yterms:
            out += x ** j * factor.deriv_value(n, y)
        return out[()] if out.ndim == 0 else out

    def __call__(self, x, y):
        return self.evaluate(x, y)

    def partial(self, dx: int, dy: int) -> "ModelExpr":
        expr = self
        for _ in range(dx):
            expr = expr._partial_x()
        for _ in range(dy):
            expr = expr._partial_y()
        return expr

    def _partial_x(self) -> "ModelExpr":
        xt = [(j, factor, n + 1) for j, factor, n in self.xterms]
        yt = [(j - 1, factor.scale(j), n) for j, factor, n in self.yterms if j >= 1]
        return ModelExpr(self.poly.partial(1, 0), tuple(xt), tuple(yt))

    def _partial_y(self) -> "ModelExpr":
        xt = [(j - 1, factor.scale(j), n) for j, factor, n in self.xterms if j >= 1]
        yt = [(j, factor, n + 1) for j, factor, n in self.yterms]
        return ModelExpr(self.poly.partial(0, 1), tuple(xt), tuple(yt))


@dataclass(frozen=True)
class SmoothModelFunction:
    """The structured model function; see the module docstring for the form.

    Normalization: 0 <= a <= b, b >= 1, unit constant term nonzero; g-term
    indices satisfy 0 <= j < b and h-term indices 0 <= j < a.
    """

    a: int
    b: int
    unit: Poly2
    g_terms: tuple[tuple[int, FlatFactor], ...] = ()
    h_terms: tuple[tuple[int, FlatFactor], ...] = ()

    def __post_init__(self):
        if not (0 <= self.a <= self.b):
            raise ValueError("need 0 <= a <= b (swap the axes to normalize)")
        if self.b < 1:
            raise ValueError("need b >= 1: with a = b = 0 there is no singularity to study")
        if self.unit.constant_term() == 0.0:
            raise ValueError("unit constant term must be nonzero")
        for j, _ in self.g_terms:
            if not 0 <= j < self.b:
                raise ValueError(f"g-term power {j} outside [0, b)")
        for j, _ in self.h_terms:
            if not 0 <= j < self.a:
                raise ValueError(f"h-term power {j} outside [0, a)")
        object.__setattr__(self, "g_terms", tuple((int(j), fac) for j, fac in self.g_terms))
        object.__setattr__(self, "h_terms", tuple((int(j), fac) for j, fac in self.h_terms))

    @classmethod
    def monomial(cls, a: int, b: int, coefficient: float = 1.0) -> "SmoothModelFunction":
        return cls(a, b, Poly2.constant(coefficient))

    def pruned(self) -> "SmoothModelFunction":
        """Drop identically-zero flat terms."""
        return SmoothModelFunction(
            self.a, self.b, self.unit,
            tuple((j, f) for j, f in self.g_terms if not f.is_zero()),
            tuple((j, f) for j, f in self.h_terms if not f.is_zero()))

    def as_expr(self) -> ModelExpr:
        return ModelExpr(
            self.unit.shift_monomial(self.a, self.b),
            tuple((j, f, 0) for j, f in self.g_terms),
            tuple((j, f, 0) for j, f in self.h_terms))

    def evaluate(self, x, y):
        return self.as_expr().evaluate(x, y)

    def __call__(self, x, y):
        return self.evaluate(x, y)

    def partial(self, dx: int, dy: int) -> ModelExpr:
        return self.as_expr().partial(dx, dy)

    def classify(self) -> str:
        f = self.pruned()
        has_g = bool(f.g_terms)
        has_h = bool(f.h_terms)
        if has_g and has_h:
            return "D"
        if has_g:
            return "B"
        if has_h:
            return "C"
        return "A"

    def taylor_support(self) -> set[tuple[int, int]]:
        """Monomial support of the Taylor series (flat terms contribute nothing)."""
        return {(a + self.a, b + self.b) for a, b in self.unit.support()}

    def reflected(self, sx: int, sy: int) -> "SmoothModelFunction":
        """The function (x, y) -> f(sx * x, sy * y) for signs sx, sy in {1,-1}."""
        unit = Poly2(tuple(
            (a, b, c * sx ** (a + self.a) * sy ** (b + self.b))
            for a, b, c in self.unit.terms))
        if unit.constant_term() == 0.0:
            raise ValueError("reflection produced a vanishing unit constant")
        g = tuple((j, (f if sx > 0 else f.reflect()).scale(float(sy ** j)))
                  for j, f in self.g_terms)
        h = tuple((j, (f if sy > 0 else f.reflect()).scale(float(sx ** j)))
                  for j, f in self.h_terms)
        return SmoothModelFunction(self.a, self.b, unit, g, h)


def evaluate(f: SmoothModelFunction, x, y):
    """Exact pointwise value of the model function."""
    return f.evaluate(x, y)


def partial(f: SmoothModelFunction, dx: int, dy: int) -> ModelExpr:
    """Symbolically exact mixed partial derivative, in the closed algebra."""
    return f.partial(dx, dy)


def classify(f: SmoothModelFunction) -> str:
    """A: no flat terms; B: g only; C: h only; D: both (zero factors pruned)."""
    return f.classify()


@dataclass(frozen=True)
class FTilde:
    """The quotient f / (x^a y^b) = v(x,y) + sum_k c_k(y) / x^k on x != 0.

    ``terms`` holds (k, factor, n) for the n-th y-derivative of a flat factor
    divided by x^k; closed under differentiation via the closed-form rule
    d^m/dx^m x^(-k) = (-1)^m (k+m-1)!/(k-1)! x^(-k-m).
    """

    poly: Poly2
    terms: tuple[tuple[int, FlatFactor, int], ...] = ()

    def value(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=float) + self.poly(x, y)
        for k, factor, n in self.terms:
            out += factor.deriv_value(n, y) / x ** k
        return out[()] if out.ndim == 0 else out

    def __call__(self, x, y):
        return self.value(x, y)

    def partial(self, dx: int, dy: int) -> "FTilde":
        poly = self.poly.partial(dx, dy)
        terms = []
        for k, factor, n in self.terms:
            coef = (-1.0) ** dx * math.prod(range(k, k + dx)) if dx else 1.0
            terms.append((k + dx, factor.scale(coef) if dx else factor, n + dy))
        return FTilde(poly, tuple(terms))

    def origin_jet(self, dx: int, dy: int) -> float:
        """Partial at the origin approached inside {x > y^m}: the poly part only.

        Every flat correction term tends to 0 there, so the boundary jets are
        those of the polynomial unit.
        """
        return self.poly.partial(dx, dy).constant_term()

    def jet2(self, x0, y0, m1: int, m2: int):
        """Bivariate jets at base points with x0 > 0, y0 >= 0 (batched, exact)."""
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        y0 = np.atleast_1d(np.asarray(y0, dtype=float))
        out = self.poly.jet2(x0, y0, m1, m2)
        for k, factor, n in self.terms:
            xjet = jets.recip_power_jet(k, x0, m1)
            yjet = factor.deriv(n).jet(y0, m2) if n == 0 else _shifted_jet(factor, n, y0, m2)
            out += xjet[..., :, None] * yjet[..., None, :]
        return out


def _shifted_jet(factor: FlatFactor, n: int, y0, m: int):
    """Jet of the n-th derivative of a flat factor (normalized coefficients)."""
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    out = np.zeros(y0.shape + (m,), dtype=float)
    fact = 1.0
    for k in range(m):
        out[..., k] = factor.deriv_value(n + k, y0) / fact
        fact *= k + 1
    return out


def f_tilde(f: SmoothModelFunction) -> FTilde:
    """f / (x^a y^b) as a closed-form object on x != 0 (cases A and C only).

    The flat corrections are h_{a-k}(y) / (y^b x^k); each coefficient is again
    a flat factor (Laurent exponents shifted by -b).
    """
    f = f.pruned()
    case = f.classify()
    if case not in ("A", "C"):
        raise UnsupportedCase(
            f"f_tilde needs empty g-terms (case A or C); classify(f) = {case}")
    terms = tuple((f.a - j, fac.shift(-f.b), 0) for j, fac in f.h_terms)
    return FTilde(f.unit, terms)


def F_part(f: SmoothModelFunction) -> ModelExpr:
    """The factor F with f = y^b F: F = v x^a + sum_j x^j h_j(y)/y^b (cases A, C)."""
    f = f.pruned()
    case = f.classify()
    if case not in ("A", "C"):
        raise UnsupportedCase(
            f"F_part needs empty g-terms (case A or C); classify(f) = {case}")
    yterms = tuple((j, fac.shift(-f.b), 0) for j, fac in f.h_terms)
    return ModelExpr(f.unit.shift_monomial(f.a, 0), (), yterms)


def check_ftilde_lower_bound(f: SmoothModelFunction, m: int, r: float,
                             c_target: float, x_max: float | None = None,
                             cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Sample f/(x^a y^b) over {x > y^m, 0 < y <= r} and report the minimum.

    Returns (ok, empirical_min) with ok = (min >= c_target).  The guaranteed
    floor for admissible inputs is v(0,0)/2^a once r is small enough.
    """
    ft = f_tilde(f)
    if x_max is None:
        x_max = r
    n = cfg.grid_points
    ys = np.geomspace(max(r * 1e-6, 1e-12), r, n)
    lo = np.maximum(ys ** m, 1e-300)
    vals = np.empty((n, n))
    for i, (y, x0) in enumerate(zip(ys, lo)):
        xs = np.geomspace(x0, max(x_max, 2.0 * x0), n)
        vals[i] = ft.value(xs, np.full(n, y))
    emp_min = float(vals.min())
    return emp_min >= c_target, emp_min


def check_F_derivative_bound(f: SmoothModelFunction, R: float,
                             cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Empirical minimum of d^a F / dx^a over [-R, R]^2; returns (mu, ok)."""
    Fa = F_part(f).partial(f.a, 0)
    n = cfg.grid_points
    xs = np.linspace(-R, R, n)
    ys = np.linspace(-R, R, n)
    vals = Fa.evaluate(xs[:, None], ys[None, :])
    mu = float(np.min(vals))
    return mu, mu > 0.0


@dataclass(frozen=True)
class PlateauProfile:
    """Even C-infinity profile: 1 on [0, inner], 0 on [outer, inf), monotone between."""

    inner: float
    outer: float

    def __post_init__(self):
        if math.isinf(self.outer):
            return
        if not (0 < self.inner < self.outer):
            raise ValueError("need 0 < inner < outer")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if math.isinf(self.outer):
            return np.ones_like(t)[()] if t.ndim == 0 else np.ones_like(t)
        w = (self.outer - np.abs(t)) / (self.outer - self.inner)
        return jets.smoothstep_value(w)

    def jet(self, t0, m: int):
        return jets.plateau_jet(t0, self.inner, self.outer, m)

    @property
    def support_end(self) -> float:
        return self.outer


@dataclass(frozen=True)
class BumpFunction:
    """Product plateau bump or one-variable cutoff, built from exp(-1/t) steps.

    kind "product-bump": value = P_x(|x|) * P_y(|y|), equal to 1 on the inner
    box and supported in the outer box, nonnegative with value 1 at the origin.
    kind "cutoff-chi": a function of y alone, 1 on |y| <= inner, 0 beyond outer
    (the x radii are infinite).
    """

    kind: str
    radii: tuple[float, float]
    inner_radii: tuple[float, float]

    def __post_init__(self):
        if self.kind not in ("product-bump", "cutoff-chi"):
            raise ValueError(f"unknown bump kind {self.kind!r}")

    @classmethod
    def product(cls, radii, inner_radii=None) -> "BumpFunction":
        rx, ry = (radii, radii) if np.isscalar(radii) else tuple(radii)
        if inner_radii is None:
            ix, iy = rx / 2.0, ry / 2.0
        elif np.isscalar(inner_radii):
            ix = iy = float(inner_radii)
        else:
            ix, iy = tuple(inner_radii)
        return cls("product-bump", (float(rx), float(ry)), (float(ix), float(iy)))

    @classmethod
    def cutoff(cls, outer: float, inner: float | None = None) -> "BumpFunction":
        """The y-cutoff: 1 for |y| <= inner (default outer/2), 0 for |y| >= outer."""
        if inner is None:
            inner = outer / 2.0
        return cls("cutoff-chi", (math.inf, float(outer)), (math.inf, float(inner)))

    @cached_property
    def x_profile(self) -> PlateauProfile:
        return PlateauProfile(self.inner_radii[0], self.radii[0])

    @cached_property
    def y_profile(self) -> PlateauProfile:
        return PlateauProfile(self.inner_radii[1], self.radii[1])

    def value(self, x, y):
        return self.x_profile.value(x) * self.y_profile.value(y)

    def __call__(self, x, y):
        return self.value(x, y)
