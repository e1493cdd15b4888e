"""Shared quadrature machinery and the run-wide numerical configuration.

All integrators accept vectorized integrands: ``f(x)`` receives a numpy array
of abscissae and must return an array of values (complex allowed).  Adaptive
routines use Gauss-Legendre panels with an embedded double-order error
estimate and a worst-panel-first refinement queue, which concentrates panels
dyadically toward integrable endpoint singularities.

For strong power-law endpoints (``x^alpha`` with ``alpha`` close to -1) plain
panel refinement cannot reach high relative accuracy, so callers state the
endpoint exponent and :func:`quad_power_endpoint` applies the substitution
``x = X * t^q`` which flattens the singularity exactly.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import QuadratureDiagnostic

__all__ = [
    "QuadratureConfig",
    "DEFAULT_CONFIG",
    "gl_rule",
    "panel_gl",
    "adaptive_quad",
    "quad_power_endpoint",
    "quad_log_interval",
    "contour_coefficients",
    "QuadResult",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Adaptive-subdivision parameters, exclusion radii, and tolerance targets.

    One instance flows through every stage of a run; the CLI exposes the
    fields in the ``[quadrature]`` section of the function-spec file.
    """

    rel_tol: float = 1e-10          # per-integral relative target
    abs_tol: float = 1e-14          # absolute floor for near-zero integrals
    max_panels: int = 4000          # refinement budget per 1-D integral
    gl_nodes: int = 16              # panel order (error estimate doubles it)
    kernel_nodes: int = 32          # Gauss-Legendre order for Taylor-remainder kernels
    kernel_selfcheck: bool = True   # double kernel_nodes once and compare
    pole_exclusion: float = 1e-3    # denominator-magnitude exclusion for candidate poles
    zero_exclusion: float = 0.0     # exploratory tube radius around the zero variety
    contour_radius: float = 1e-2    # pole-detection contour radius
    contour_nodes: int = 128        # nodes per detection contour
    residue_threshold: float = 1e-6 # |residue| below this is "no pole"
    scan_cells: int = 8             # window cells scanned for unexpected residue mass
    scan_nodes: int = 32            # nodes per scan-cell edge
    shell_count: int = 10           # dyadic shells for divergence-onset fits
    grid_points: int = 201          # per-axis density for empirical min/sup checks
    taylor_tail: int = 8            # extra jet orders used in series zones

    def with_(self, **kw) -> "QuadratureConfig":
        return replace(self, **kw)


DEFAULT_CONFIG = QuadratureConfig()


@dataclass
class QuadResult:
    value: complex
    error: float
    panels: int = 0

    def __complex__(self):
        return complex(self.value)


@lru_cache(maxsize=64)
def gl_rule(n: int):
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_gl(f, a: float, b: float, n: int) -> complex:
    x, w = gl_rule(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    vals = np.asarray(f(mid + half * x))
    return half * np.sum(w * vals)


def _panel_pair(f, a, b, n):
    """(coarse, fine) Gauss-Legendre estimates for one panel."""
    x1, w1 = gl_rule(n)
    x2, w2 = gl_rule(2 * n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = np.concatenate([mid + half * x1, mid + half * x2])
    vals = np.asarray(f(pts))
    coarse = half * np.sum(w1 * vals[:n])
    fine = half * np.sum(w2 * vals[n:])
    return coarse, fine


def adaptive_quad(f, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                  rel_tol: float | None = None, abs_tol: float | None = None) -> QuadResult:
    """Adaptive Gauss-Legendre on [a, b] with worst-panel-first refinement."""
    rel = cfg.rel_tol if rel_tol is None else rel_tol
    absf = cfg.abs_tol if abs_tol is None else abs_tol
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    n = cfg.gl_nodes
    coarse, fine = _panel_pair(f, a, b, n)
    # heap of (-error, counter, a, b, fine_value, error)
    heap = [(-abs(fine - coarse), 0, a, b, fine, abs(fine - coarse))]
    counter = 1
    total = fine
    total_err = abs(fine - coarse)
    while heap and counter < cfg.max_panels:
        neg_err, _, pa, pb, pval, perr = heapq.heappop(heap)
        if total_err <= max(absf, rel * abs(total)):
            heapq.heappush(heap, (neg_err, counter, pa, pb, pval, perr))
            break
        pm = 0.5 * (pa + pb)
        acc_val = 0.0 + 0.0j
        acc_err = 0.0
        for qa, qb in ((pa, pm), (pm, pb)):
            c, fv = _panel_pair(f, qa, qb, n)
            err = abs(fv - c)
            heapq.heappush(heap, (-err, counter, qa, qb, fv, err))
            counter += 1
            acc_val += fv
            acc_err += err
        total += acc_val - pval
        total_err += acc_err - perr
    return QuadResult(total, total_err, counter)


def quad_power_endpoint(f, X: float, alpha: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                        rel_tol: float | None = None, abs_tol: float | None = None) -> QuadResult:
    """Integrate f over (0, X] where f(x) ~ x^alpha * (smooth), alpha > -1.

    Substitutes x = X t^q with q chosen so the transformed integrand vanishes
    at t = 0 at least linearly, removing the power-law endpoint exactly.
    """
    if X <= 0:
        return QuadResult(0.0, 0.0, 0)
    if alpha <= -1:
        raise QuadratureDiagnostic(f"endpoint exponent {alpha} is not integrable")
    q = max(1, math.ceil(2.0 / (1.0 + alpha)))

    def g(t):
        t = np.asarray(t, dtype=float)
        x = X * t ** q
        return f(x) * (X * q) * t ** (q - 1)

    return adaptive_quad(g, 0.0, 1.0, cfg, rel_tol=rel_tol, abs_tol=abs_tol)


def quad_log_interval(f, c: float, d: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                      rel_tol: float | None = None, abs_tol: float | None = None) -> QuadResult:
    """Integrate f over [c, d], 0 < c < d, uniformly over many decades.

    Log substitution u = exp(w); suited to power-law integrands whose mass may
    sit at either end of a wide interval.
    """
    if not (0 < c < d):
        if c == d:
            return QuadResult(0.0, 0.0, 0)
        raise QuadratureDiagnostic(f"invalid log interval [{c}, {d}]")
    lc, ld = math.log(c), math.log(d)

    def g(w):
        u = np.exp(w)
        return f(u) * u

    return adaptive_quad(g, lc, ld, cfg, rel_tol=rel_tol, abs_tol=abs_tol)


def contour_coefficients(f, center: complex, radius: float, n: int, orders=(1,)):
    """Discrete Laurent coefficients a_{-k} of f on a circle, by trapezoid rule.

    a_{-k} = (1/2 pi i) oint f(s) (s - center)^{k-1} ds, evaluated as
    rho^k * mean_j f(z_j) e^{i k theta_j}.  The evaluator f is called once per
    node (scalar), since contour targets are typically expensive pipelines.
    """
    theta = 2.0 * np.pi * np.arange(n) / n
    zs = center + radius * np.exp(1j * theta)
    vals = np.array([f(z) for z in zs], dtype=complex)
    out = {}
    for k in orders:
        out[k] = radius ** k * np.mean(vals * np.exp(1j * k * theta))
    return out
