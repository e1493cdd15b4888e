"""Meromorphic continuation of L(s) = integral_0^r u^(As+B) psi(u; s) du.

Expanding psi to order N at u = 0 gives

    L(s) = sum_{k<=N} r^(As+B+k+1) psi_k(s) / (As+B+k+1)
           + integral_0^r u^(As+B+N+1) R_N(u; s) du,

where psi_k are the derivatives at 0 over k! and R_N is the Taylor remainder.
The sum is meromorphic with simple poles on the lattice {-(B+j)/A : j >= 1};
the remainder integral is holomorphic for Re(s) > -(B+N+2)/A, which is the
half-plane the continuation reaches at order N.

Numerically the remainder integral is split at a small crossover u0: on
[0, u0] the remainder equals the tail of the Taylor series and is integrated
in closed form from higher-order jets; on [u0, r] it is evaluated pointwise
as psi minus the Taylor head (no cancellation once u is bounded away from 0).
Accuracy guarantees hold on bounded s-windows; nothing controls growth as
|Im s| -> infinity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import HalfPlaneExceeded, PoleProximity
from .quad import DEFAULT_CONFIG, QuadratureConfig, adaptive_quad

__all__ = [
    "JetProvider1D",
    "ContinuationResult",
    "continue_L",
    "poles_L",
    "residue_L",
    "continue_L_unbounded",
    "CandidatePole",
    "default_order",
]


@dataclass(frozen=True)
class JetProvider1D:
    """Supplier of psi(u; s) values and u-derivatives of psi at u = 0.

    ``point_value(u, s)`` must accept a numpy array of abscissae; the
    ``derivs0(s, order)`` callable returns [psi(0;s), psi'(0;s), ...,
    psi^(order)(0;s)].  For fixed u the map s -> psi(u; s) is assumed entire,
    and the jets at 0 must reproduce psi via its Taylor series on some
    interval [0, u*] (true for analytic psi and for plateau-cutoff products).
    Instances are read-only and safe to share across threads.
    """

    point_value: Callable
    derivs0: Callable
    series_radius: float = math.inf  # upper bound for the series crossover u0

    @classmethod
    def from_taylor(cls, coeff_fn: Callable, value_fn: Callable,
                    series_radius: float = math.inf) -> "JetProvider1D":
        """coeff_fn(s, order) -> normalized Taylor coefficients c_k = psi_k/k!."""

        def derivs0(s, order):
            c = np.asarray(coeff_fn(s, order), dtype=complex)
            fact = np.cumprod(np.concatenate([[1.0], np.arange(1, order + 1)]))
            return c * fact

        return cls(value_fn, derivs0, series_radius)

    @classmethod
    def constant(cls, c: float = 1.0) -> "JetProvider1D":
        def value(u, s):
            return np.full_like(np.asarray(u, dtype=float), c, dtype=complex)

        def derivs0(s, order):
            out = np.zeros(order + 1, dtype=complex)
            out[0] = c
            return out

        return cls(value, derivs0)

    @classmethod
    def from_callable(cls, fn: Callable, series_radius: float = math.inf,
                      fd_scale: float = 1e-2) -> "JetProvider1D":
        """Finite-difference fallback: central differences with Richardson.

        Derivative orders up to 8 are supported; beyond that the stencils are
        too ill-conditioned to be trustworthy and a ValueError is raised.
        """

        def value(u, s):
            u = np.asarray(u, dtype=float)
            return np.asarray([fn(ui, s) for ui in np.atleast_1d(u)], dtype=complex).reshape(u.shape)

        def derivs0(s, order):
            if order > 8:
                raise ValueError("finite-difference jets are limited to order 8")
            out = np.zeros(order + 1, dtype=complex)
            out[0] = fn(0.0, s)
            for k in range(1, order + 1):
                h = fd_scale
                # one-sided stencils are avoided by even extension around 0:
                # psi is smooth on [0, r], extend by the Taylor side only
                est_prev = _fd_deriv(fn, s, k, h)
                est = _fd_deriv(fn, s, k, h / 2.0)
                rich = (2 ** k * est - est_prev) / (2 ** k - 1)
                out[k] = rich
            return out

        return cls(value, derivs0, series_radius)


def _fd_deriv(fn, s, k, h):
    """k-th derivative at 0 from function values on [0, k*h] (forward grid)."""
    # forward finite difference: f^(k)(0) ~ h^-k sum_j (-1)^(k-j) C(k,j) f(j h)
    acc = 0.0 + 0.0j
    for j in range(k + 1):
        acc += (-1) ** (k - j) * math.comb(k, j) * fn(j * h, s)
    return acc / h ** k


@dataclass(frozen=True)
class CandidatePole:
    """A candidate pole location with its generating lattice."""

    location: complex
    source: str
    exact: object = None  # Fraction when available

    def __complex__(self):
        return complex(self.location)


@dataclass
class ContinuationResult:
    """Value of a continued integral with its validity bookkeeping.

    half_plane is the real abscissa: the value is certified for
    Re(s) > half_plane at the order used.  remainder_estimate bounds the
    quadrature plus series-truncation error of the remainder pieces;
    nearest_pole is the closest candidate pole to the queried point.
    """

    value: complex
    order_used: int
    half_plane: float
    nearest_pole: CandidatePole | None = None
    remainder_estimate: float = 0.0
    binding_constraint: str = ""
    parts: dict = field(default_factory=dict)


def poles_L(A: int, B: int):
    """Generator of the candidate-pole progression -(B+j)/A, j = 1, 2, ...

    All candidates are simple-pole candidates (order one).
    """
    from fractions import Fraction

    j = 1
    while True:
        yield CandidatePole(-(B + j) / A, "u-lattice", Fraction(-(B + j), A))
        j += 1


def default_order(A: int, B: int, s: complex) -> int:
    """Smallest N with -(B+N+2)/A < Re(s) - 1: one extra order of margin."""
    need = -A * (s.real - 1.0) - B - 2.0
    return max(0, int(math.floor(need)) + 1)


def _check_preconditions(A, B, r, s, N, cfg):
    s = complex(s)
    abscissa = -(B + N + 2.0) / A
    if s.real <= abscissa:
        raise HalfPlaneExceeded(s, abscissa, hint=f"increase N beyond {N}")
    exclusion = cfg.pole_exclusion / A
    nearest = None
    best = math.inf
    for j in range(1, N + 2):
        pole = -(B + j) / A
        dist = abs(s - pole)
        if dist < best:
            best = dist
            nearest = CandidatePole(pole, "u-lattice")
        if dist < exclusion:
            raise PoleProximity(s, pole, dist, exclusion)
    return s, abscissa, nearest


def continue_L(A: int, B: int, r: float, jets: JetProvider1D, s: complex,
               N: int | None = None, cfg: QuadratureConfig = DEFAULT_CONFIG) -> ContinuationResult:
    """Continued value of integral_0^r u^(As+B) psi(u;s) du at order N.

    For Re(s) > -(B+1)/A this agrees with direct quadrature; beyond, it is
    the meromorphic continuation described in the module docstring.
    """
    if A < 1 or B < 0 or r <= 0:
        raise ValueError("need A >= 1, B >= 0, r > 0")
    s = complex(s)
    if N is None:
        N = default_order(A, B, s)
    s, abscissa, nearest = _check_preconditions(A, B, r, s, N, cfg)

    tail = cfg.taylor_tail
    d = np.asarray(jets.derivs0(s, N + tail), dtype=complex)
    fact = np.cumprod(np.concatenate([[1.0], np.arange(1.0, N + tail + 1.0)]))
    c = d / fact  # normalized Taylor coefficients

    # crossover: generous when deep in the continuation (cancellation there),
    # tiny when nearly holomorphic (series barely used)
    sigma = A * s.real + B
    k0 = int(min(10, max(3, 8 + math.floor(sigma + 1.0))))
    u0 = min(r, jets.series_radius) * 2.0 ** (-k0)

    head = 0.0 + 0.0j
    for k in range(N + 1):
        w = A * s + B + k + 1.0
        head += c[k] * cmath.exp(w * math.log(r)) / w

    # series zone [0, u0]: tail orders in closed form
    series = 0.0 + 0.0j
    last_term = 0.0
    for k in range(N + 1, N + tail + 1):
        w = A * s + B + k + 1.0
        term = c[k] * cmath.exp(w * math.log(u0)) / w
        series += term
        last_term = abs(term)

    # pointwise zone [u0, r]: psi minus its Taylor head, no small-u blowup
    kk = np.arange(N + 1)

    def integrand(u):
        u = np.asarray(u, dtype=float)
        vals = np.asarray(jets.point_value(u, s), dtype=complex)
        headv = (c[None, : N + 1] * u[:, None] ** kk[None, :]).sum(axis=1)
        return np.exp((A * s + B) * np.log(u)) * (vals - headv)

    quad = adaptive_quad(integrand, u0, r, cfg)
    cancell = np.finfo(float).eps * max(1.0, float(np.abs(c[: N + 1]).sum())) * u0 ** (sigma + 1.0)
    est = quad.error + last_term + cancell

    return ContinuationResult(
        value=head + series + quad.value,
        order_used=N,
        half_plane=abscissa,
        nearest_pole=nearest,
        remainder_estimate=float(est),
        parts={"head": head, "series": series, "pointwise": quad.value},
    )


def residue_L(A: int, B: int, r: float, jets: JetProvider1D, j: int) -> complex:
    """Residue at s_j = -(B+j)/A: psi^(j-1)(0; s_j) / ((j-1)! A).

    Only the k = j-1 head term is singular there; r^(As+B+j) equals 1 at s_j,
    so the residue is the coefficient divided by A.
    """
    if j < 1:
        raise ValueError("pole index j starts at 1")
    s_j = -(B + j) / A
    d = np.asarray(jets.derivs0(s_j, j - 1), dtype=complex)
    return d[j - 1] / (math.factorial(j - 1) * A)


def continue_L_unbounded(A: int, B: int, jets: JetProvider1D, s: complex,
                         N: int | None = None, split: float | None = None,
                         support_end: float | None = None,
                         cfg: QuadratureConfig = DEFAULT_CONFIG) -> ContinuationResult:
    """Continuation of integral_0^inf u^(As+B) psi(u;s) du for compact psi.

    Splits at a point inside the support: the [0, split] piece continues via
    :func:`continue_L`; the rest is an entire function of s evaluated by
    direct quadrature (u is bounded away from 0 there).  ``split`` defaults
    to the provider's series radius, ``support_end`` must be given when the
    provider does not carry one.
    """
    s = complex(s)
    if split is None:
        if not math.isfinite(jets.series_radius):
            raise ValueError("need an explicit split point for this provider")
        split = jets.series_radius
    end = support_end if support_end is not None else getattr(jets, "support_end", None)
    if end is None:
        raise ValueError("need the support end of psi")
    inner = continue_L(A, B, split, jets, s, N, cfg)
    if end > split:
        def integrand(u):
            u = np.asarray(u, dtype=float)
            vals = np.asarray(jets.point_value(u, s), dtype=complex)
            return np.exp((A * s + B) * np.log(u)) * vals

        outer = adaptive_quad(integrand, split, end, cfg)
    else:
        from .quad import QuadResult

        outer = QuadResult(0.0, 0.0)
    inner.value += outer.value
    inner.remainder_estimate += outer.error
    inner.parts["entire"] = outer.value
    return inner
