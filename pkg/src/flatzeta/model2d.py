"""Meromorphic continuation of H(s) = int_D u^(as) v^(bs) psi(u,v;s) du dv.

The region is D = {(u,v): v^p < u <= R, 0 <= v <= r} with r^p <= R.  The
double Taylor expansion of psi at the origin to order N in each variable
splits H into

  * a leading sum of closed-form monomial integrals H_{alpha,beta}(s), which
    carry all the poles: three arithmetic progressions
    {-j/a}, {-k/b}, {-(p+l)/(ap+b)}  (j, k, l >= 1);
  * edge remainders A_alpha (v-direction Taylor tail, two 1-D v-integrals
    against the kernel averaged from jets along the v-axis) and B_beta
    (u-direction tail, one u^(1/p)-substituted piece on [0, r^p] plus an
    entire piece on [r^p, R]);
  * a doubly-mixed remainder C, holomorphic on Re(s) > -(N+2)/b.

C is integrated after an exact interchange of the Taylor-kernel average with
the region integral: substituting the kernel variables and swapping the order
turns it into a single rectangle integral of the jet entry against an
explicit closed-form weight, which removes the nested kernel quadrature
without changing the value.

Prepared objects freeze the quadrature geometry once and evaluate at many s
values cheaply; pole-detection contours reuse one prepared continuation.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from fractions import Fraction
from heapq import merge as heap_merge
from typing import Callable, Sequence

import numpy as np

from .errors import HalfPlaneExceeded, PoleProximity
from .model1d import CandidatePole, ContinuationResult
from .quad import DEFAULT_CONFIG, QuadratureConfig, adaptive_quad, quad_power_endpoint

__all__ = [
    "RegionD",
    "JetProvider2D",
    "AnalyticJets2D",
    "H_monomial",
    "candidate_poles",
    "continue_H",
    "remainder_A",
    "remainder_B",
    "remainder_C",
    "PreparedContinuationH",
    "prepare_continuation",
    "continuation_abscissa",
    "quad_H_direct",
]


@dataclass(frozen=True)
class RegionD:
    """The curved integration region {v^p < u <= R, 0 <= v <= r}, r^p <= R.

    The complementary region below the curve (0 <= u <= v^p) is intentionally
    not representable here; pipelines treat that part through sublevel bounds
    instead of a second expansion.
    """

    p: int
    r: float
    R: float

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("curve exponent p must be a positive integer")
        if not (self.r > 0 and self.R > 0):
            raise ValueError("need positive radii")
        if self.r ** self.p > self.R * (1 + 1e-12):
            raise ValueError("region requires r^p <= R")


class JetProvider2D:
    """Supplier of bivariate Taylor jets of psi(.,.;s) on the closed rectangle.

    Implementations must be smooth on [0, R] x [0, r] (a smooth extension of
    psi beyond the curved part of D is part of the provider contract) and
    entire in s for fixed (u, v).  ``taylor2`` returns normalized coefficients
    T[i, j] = psi^(i,j)(u, v; s) / (i! j!) stacked over a batch of points.

    ``prepare`` may be overridden with a faster factored representation; the
    default simply re-evaluates taylor2 per s and extracts the requested
    entries.
    """

    def taylor2(self, xs, ys, m1: int, m2: int, s: complex):
        raise NotImplementedError

    def prepare(self, xs, ys, m1: int, m2: int, entries):
        provider = self
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        idx = tuple(np.array(e) for e in zip(*entries)) if entries else None

        class _Prepared:
            def eval(self, s):
                jets = provider.taylor2(xs, ys, m1, m2, s)
                if idx is None:
                    return jets
                return jets[..., idx[0], idx[1]]

        return _Prepared()


class AnalyticJets2D(JetProvider2D):
    """Provider backed by a closed-form normalized-coefficient function.

    ``coeff_fn(xs, ys, m1, m2, s) -> array[..., m1, m2]``; e.g. for
    psi = exp(u+v) the entries are exp(u+v)/(i! j!), independent of s.
    """

    def __init__(self, coeff_fn: Callable, value_fn: Callable | None = None):
        self.coeff_fn = coeff_fn
        self.value_fn = value_fn

    @classmethod
    def exp_uv(cls) -> "AnalyticJets2D":
        def coeff(xs, ys, m1, m2, s):
            xs = np.asarray(xs, dtype=float)
            ys = np.asarray(ys, dtype=float)
            base = np.exp(xs + ys)
            fact1 = np.cumprod(np.concatenate([[1.0], np.arange(1.0, m1)]))
            fact2 = np.cumprod(np.concatenate([[1.0], np.arange(1.0, m2)]))
            return base[..., None, None] / (fact1[:, None] * fact2[None, :])

        return cls(coeff, lambda u, v, s: np.exp(u + v))

    @classmethod
    def monomial(cls, a0: int, b0: int) -> "AnalyticJets2D":
        def coeff(xs, ys, m1, m2, s):
            xs = np.asarray(xs, dtype=float)
            ys = np.asarray(ys, dtype=float)
            out = np.zeros(xs.shape + (m1, m2), dtype=float)
            for i in range(min(a0, m1 - 1) + 1):
                for j in range(min(b0, m2 - 1) + 1):
                    out[..., i, j] = (math.comb(a0, i) * math.comb(b0, j)
                                      * xs ** (a0 - i) * ys ** (b0 - j))
            return out

        return cls(coeff, lambda u, v, s: u ** a0 * v ** b0)

    @classmethod
    def constant(cls, c: float = 1.0) -> "AnalyticJets2D":
        def coeff(xs, ys, m1, m2, s):
            xs = np.asarray(xs, dtype=float)
            out = np.zeros(np.broadcast_shapes(xs.shape, np.shape(ys)) + (m1, m2), dtype=float)
            out[..., 0, 0] = c
            return out

        return cls(coeff, lambda u, v, s: np.full(np.broadcast_shapes(np.shape(u), np.shape(v)), c))

    def taylor2(self, xs, ys, m1, m2, s):
        return self.coeff_fn(xs, ys, m1, m2, s)


def _cpow(base: float, w: complex):
    """base^w for base > 0 (principal); exact 0 for base == 0 with Re w > 0."""
    if base == 0.0:
        return 0.0 + 0.0j
    return complex(np.exp(w * math.log(base)))


def _guard_denominator(den: complex, s: complex, coef: float, cfg: QuadratureConfig):
    if abs(den) < cfg.pole_exclusion:
        pole = s - den / coef
        raise PoleProximity(s, pole, abs(den) / coef, cfg.pole_exclusion / coef)


def H_monomial(region: RegionD, a: int, b: int, alpha: int, beta: int, s: complex,
               cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Closed form of int_D u^(as+alpha) v^(bs+beta) du dv."""
    s = complex(s)
    p, r, R = region.p, region.r, region.R
    d1 = a * s + alpha + 1
    d2 = b * s + beta + 1
    d3 = (a * p + b) * s + alpha * p + beta + p + 1
    _guard_denominator(d1, s, a, cfg)
    _guard_denominator(d2, s, b, cfg)
    _guard_denominator(d3, s, a * p + b, cfg)
    return (1.0 / d1) * (_cpow(R, d1) * _cpow(r, d2) / d2 - _cpow(r, d3) / d3)


def candidate_poles(a: int, b: int, p: int):
    """Merged decreasing generator of the three candidate-pole lattices.

    Sources are tagged "u-lattice" (-j/a), "v-lattice" (-k/b) and
    "curve-lattice" (-(p+l)/(ap+b)); indices start at 1.
    """

    def lattice(num_start, num_step, den, tag):
        k = 0
        while True:
            num = num_start + k * num_step
            yield (Fraction(-num, den), tag)
            k += 1

    streams = [
        lattice(1, 1, a, "u-lattice"),
        lattice(1, 1, b, "v-lattice"),
        lattice(p + 1, 1, a * p + b, "curve-lattice"),
    ]
    for frac, tag in heap_merge(*streams, key=lambda it: -it[0]):
        yield CandidatePole(float(frac), tag, frac)


def continuation_abscissa(a: int, b: int, p: int, N: int) -> tuple[float, str]:
    """Guaranteed half-plane abscissa at order N and the binding piece.

    The candidates are the remainder half-planes: the v-tail needs
    max(-(N+2)/b, -(p+N+2)/(ap+b)); the u-tail needs -(pN+2p+1)/(ap+b);
    the doubly-mixed tail needs -(N+2)/b.
    """
    cands = {
        "A-remainder": max(-(N + 2.0) / b, -(p + N + 2.0) / (a * p + b)),
        "B-remainder": -(p * N + 2.0 * p + 1.0) / (a * p + b),
        "C-remainder": -(N + 2.0) / b,
    }
    name, val = max(cands.items(), key=lambda kv: kv[1])
    return val, name


# ----------------------------------------------------------------------------
# fixed power-graded grids


def _composite_gl(breaks: Sequence[float], ng: int):
    from .quad import gl_rule

    x, w = gl_rule(ng)
    nodes = []
    weights = []
    for lo, hi in zip(breaks, breaks[1:]):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        nodes.append(mid + half * x)
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _graded_breaks(t_floor: float, splits: Sequence[float], ratio: float = 0.5,
                   end_depth: float = 1e-7):
    pts = {t_floor, 1.0}
    t = 0.5
    while t > t_floor:
        pts.add(t)
        t *= ratio
    d = 0.25
    while d > end_depth:
        pts.add(1.0 - d)
        d *= 0.5
    for sp in splits:
        if t_floor < sp < 1.0:
            pts.add(sp)
    return sorted(pts)


def power_graded_grid(hi: float, q: int, ng: int, splits: Sequence[float] = (),
                      t_floor: float = 1e-6, ratio: float = 0.5,
                      end_depth: float = 1e-7):
    """Nodes and weights for int_0^hi f(y) dy under y = hi * t^q.

    The substitution flattens y^w endpoint behavior whenever q*(Re w + 1) >= 2;
    panels are graded toward both t = 0 and t = 1 and split at the mapped
    feature points, so plateau/cutoff transitions stay resolved.
    """
    t_floor = max(t_floor, (1e-250) ** (1.0 / q))
    mapped = [min(1.0, (sp / hi) ** (1.0 / q)) for sp in splits if 0 < sp < hi]
    breaks = _graded_breaks(t_floor, mapped, ratio, end_depth)
    t, wt = _composite_gl(breaks, ng)
    y = hi * t ** q
    wy = wt * hi * q * t ** (q - 1)
    return y, wy


def _grading_exponent(min_power: float, cap: int = 64) -> int:
    """Substitution power q so the worst y^w endpoint has q*(w+1) >= 2."""
    margin = min_power + 1.0
    if margin <= 1e-3:
        return cap
    return int(min(cap, max(1, math.ceil(2.0 / margin))))


# ----------------------------------------------------------------------------
# prepared continuation


class PreparedContinuationH:
    """Quadrature geometry and jet handles frozen for one (region, a, b, N).

    ``re_s_min`` is the left edge of the s-window the grids are graded for;
    it defaults to the guaranteed abscissa plus a small margin.  Evaluating
    at many s values amortizes the build cost (contour integrals, line scans).
    """

    def __init__(self, region: RegionD, a: int, b: int, jets: JetProvider2D,
                 N: int, cfg: QuadratureConfig = DEFAULT_CONFIG,
                 re_s_min: float | None = None,
                 u_features: Sequence[float] = (), v_features: Sequence[float] = ()):
        if a < 1 or b < a:
            raise ValueError("need integers 1 <= a <= b")
        if N < 1:
            raise ValueError("need expansion order N >= 1")
        self.region = region
        self.a, self.b, self.N = a, b, N
        self.cfg = cfg
        self.jets = jets
        self.abscissa, self.binding = continuation_abscissa(a, b, region.p, N)
        if re_s_min is None:
            re_s_min = self.abscissa + cfg.pole_exclusion
        self.re_s_min = max(re_s_min, self.abscissa)
        self._build(u_features, v_features)

    # -- grid construction ----------------------------------------------------

    def _build(self, u_features, v_features):
        region, a, b, N, cfg = self.region, self.a, self.b, self.N, self.cfg
        p, r, R = region.p, region.r, region.R
        smin = self.re_s_min
        ng = max(8, cfg.gl_nodes // 2)
        ker = cfg.kernel_nodes

        # origin jets: full leading matrix
        m1, m2 = N + 2, N + 2
        self._h_origin = self.jets.prepare(
            np.array([0.0]), np.array([0.0]), m1, m2,
            [(i, j) for i in range(N + 1) for j in range(N + 1)])

        # A-piece: v-integrals of v^w * Atilde_alpha(v), w from the two columns
        wA = min(b * smin + N + 1.0, (a * p + b) * smin + p + N + 1.0)
        qA = _grading_exponent(wA)
        vA, wvA = power_graded_grid(r, qA, ng, splits=v_features)
        tA, ptrA = self._kernel_segments(vA, v_features, ker)
        ptsA = tA[:, 0] * np.repeat(vA, np.diff(ptrA))
        self._A_nodes = (vA, wvA, tA, ptrA)
        self._hA = self.jets.prepare(
            np.zeros_like(ptsA), ptsA, N + 1, N + 2,
            [(al, N + 1) for al in range(N + 1)])

        # B-piece: the substituted [0, r^p] integral and the entire [r^p, R] one
        wB = ((a * p + b) * smin + p * N + p + 1.0) / p
        qB = _grading_exponent(wB)
        u1, wu1 = power_graded_grid(r ** p, qB, ng, splits=u_features)
        lo = r ** p
        breaks = [lo]
        while breaks[-1] < R:
            breaks.append(min(R, breaks[-1] * 2.0))
        for f in u_features:
            if lo < f < R:
                breaks.append(f)
        u2, wu2 = _composite_gl(sorted(set(breaks)), ng)
        uB = np.concatenate([u1, u2])
        self._B_split = len(u1)
        tB, ptrB = self._kernel_segments(uB, u_features, ker)
        ptsB = tB[:, 0] * np.repeat(uB, np.diff(ptrB))
        self._B_nodes = (uB, np.concatenate([wu1, wu2]), tB, ptrB)
        self._hB = self.jets.prepare(
            ptsB, np.zeros_like(ptsB), N + 2, N + 1,
            [(N + 1, be) for be in range(N + 1)])

        # C-piece: rectangle grid for the reordered doubly-mixed remainder
        wCx = a * smin + N
        wCy = b * smin + N
        qx = _grading_exponent(wCx + 1.0)
        qy = _grading_exponent(wCy + 1.0)
        ngc = max(8, ng - 4)
        xC, wxC = power_graded_grid(R, qx, ngc, splits=u_features, t_floor=1e-5,
                                    ratio=0.25, end_depth=2e-3)
        yC, wyC = power_graded_grid(r, qy, ngc, splits=v_features, t_floor=1e-5,
                                    ratio=0.25, end_depth=2e-3)
        self._C_nodes = (xC, wxC, yC, wyC)
        XX = np.repeat(xC, len(yC))
        YY = np.tile(yC, len(xC))
        self._hC = self.jets.prepare(XX, YY, N + 2, N + 2, [(N + 1, N + 1)])
        # geometry reused by the closed-form weight: vlo = max(y, v0(x))
        v0 = np.minimum(xC ** (1.0 / p), r)
        self._C_geom = {
            "v0": v0,
            "log_x": np.log(xC),
            "log_y": np.log(yC),
            "log_v0": np.log(np.maximum(v0, 1e-300)),
            "y_above": yC[None, :] >= v0[:, None],
            "x_below": (v0 < r)[:, None],
        }

    @staticmethod
    def _kernel_segments(base_nodes, features, ker):
        """Per-node composite GL on [0, 1], split where t*node crosses a feature."""
        ts = []
        ptr = [0]
        for v in base_nodes:
            splits = sorted({f / v for f in features if 0.0 < f < v})
            t, w = _composite_gl([0.0] + splits + [1.0], ker)
            ts.append(np.stack([t, w]))
            ptr.append(ptr[-1] + len(t))
        return np.concatenate(ts, axis=1).T, np.array(ptr)

    # -- evaluation -----------------------------------------------------------

    def _guard(self, s: complex):
        s = complex(s)
        if s.real <= self.abscissa:
            raise HalfPlaneExceeded(
                s, self.abscissa,
                hint=f"binding piece: {self.binding}; increase N beyond {self.N}")
        a, b, p, N, cfg = self.a, self.b, self.region.p, self.N, self.cfg
        nearest = None
        best = math.inf
        stop = min(s.real, self.abscissa) - 2.0 - abs(s.imag)
        for count, pole in enumerate(candidate_poles(a, b, p)):
            loc = pole.location
            if loc < stop or count > 500:
                break
            dist = abs(s - loc)
            if dist < best:
                best, nearest = dist, pole
            coef = {"u-lattice": a, "v-lattice": b, "curve-lattice": a * p + b}[pole.source]
            if dist < cfg.pole_exclusion / coef:
                raise PoleProximity(s, loc, dist, cfg.pole_exclusion / coef)
        return s, nearest

    def _kernel_fold(self, handle, nodes, s):
        """Fold jet rows with the (1-t)^N kernel weights per base node."""
        base, wbase, tw, ptr = nodes
        rows = np.asarray(handle.eval(s))
        kern = (tw[:, 1] * (1.0 - tw[:, 0]) ** self.N)[:, None] * rows
        folded = np.add.reduceat(kern, ptr[:-1], axis=0)
        return (self.N + 1.0) * folded

    def leading(self, s: complex) -> complex:
        s = complex(s)
        N = self.N
        T = np.asarray(self._h_origin.eval(s)).reshape(N + 1, N + 1)
        acc = 0.0 + 0.0j
        for al in range(N + 1):
            for be in range(N + 1):
                if T[al, be] != 0.0:
                    acc += T[al, be] * H_monomial(self.region, self.a, self.b,
                                                  al, be, s, self.cfg)
        return acc

    def remainder_A_all(self, s: complex) -> np.ndarray:
        """A_alpha(s) for alpha = 0..N (vector)."""
        s = complex(s)
        a, b, p, N = self.a, self.b, self.region.p, self.N
        r, R = self.region.r, self.region.R
        vA, wvA, _, _ = self._A_nodes
        At = self._kernel_fold(self._hA, self._A_nodes, s)   # [nv, N+1]
        logv = np.log(vA)
        w1 = np.exp((b * s + N + 1.0) * logv) * wvA
        IA1 = w1 @ At
        alphas = np.arange(N + 1)
        base = np.exp(((a * p + b) * s + p + N + 1.0) * logv) * wvA
        vpow = np.exp(np.outer(p * logv, alphas))
        IA2 = (base[:, None] * vpow * At).sum(axis=0)
        d1 = a * s + alphas + 1.0
        for den in d1:
            _guard_denominator(den, s, a, self.cfg)
        Rpow = np.array([_cpow(R, w) for w in d1])
        return (Rpow * IA1 - IA2) / d1

    def remainder_B_all(self, s: complex) -> np.ndarray:
        """B_beta(s) for beta = 0..N (vector)."""
        s = complex(s)
        a, b, p, N = self.a, self.b, self.region.p, self.N
        r = self.region.r
        uB, wuB, _, _ = self._B_nodes
        Bt = self._kernel_fold(self._hB, self._B_nodes, s)   # [nu, N+1]
        betas = np.arange(N + 1)
        k = self._B_split
        logu = np.log(uB)
        # substituted piece on [0, r^p]: exponent ((ap+b)s + pN + p + beta + 1)/p
        w1 = np.exp((((a * p + b) * s + p * N + p + 1.0) / p) * logu[:k]) * wuB[:k]
        upow1 = np.exp(np.outer(logu[:k] / p, betas))
        IB1 = (w1[:, None] * upow1 * Bt[:k]).sum(axis=0)
        # entire piece on [r^p, R]
        w2 = np.exp((a * s + N + 1.0) * logu[k:]) * wuB[k:]
        IB2 = w2 @ Bt[k:]
        d2 = b * s + betas + 1.0
        for den in d2:
            _guard_denominator(den, s, b, self.cfg)
        rpow = np.array([_cpow(r, w) for w in d2])
        return (IB1 + rpow * IB2) / d2

    def _c_weight(self, s: complex):
        """Closed-form weight W(x, y; s) of the reordered doubly-mixed remainder.

        W = int over {(u,v) in D : u > x, v > y} of
            u^(as+N) (1-x/u)^N  v^(bs+N) (1-y/v)^N du dv,
        expanded binomially; all inner integrals are elementary.  With
        vlo = max(y, v0(x)), v0 = min(x^(1/p), r), the v-range splits into
        [y, v0] (inner u from x to R) and [vlo, r] (inner u from v^p to R),
        so every power factors over the x- and y-grids separately.
        """
        a, b, p, N = self.a, self.b, self.region.p, self.N
        r, R = self.region.r, self.region.R
        geom = self._C_geom
        log_x, log_y, log_v0 = geom["log_x"], geom["log_y"], geom["log_v0"]
        mask = geom["y_above"]            # y >= v0: piece-2-only points
        have2 = mask | geom["x_below"]
        E = a * s + N
        F = b * s + N
        logr = math.log(r)
        logR = math.log(R)
        bin_n = [math.comb(N, i) for i in range(N + 1)]
        ii = np.arange(N + 1)
        G = E - ii + 1.0
        Hv = F - ii + 1.0
        for g in G:
            _guard_denominator(g, s, a, self.cfg)
        for h in Hv:
            _guard_denominator(h, s, b, self.cfg)
        for g in G:
            for h in Hv:
                _guard_denominator(h + p * g, s, a * p + b, self.cfg)
        RG = np.exp(G * logR)
        xG = np.exp(np.multiply.outer(G, log_x))            # [N+1, nx]
        xi = np.array(bin_n)[:, None] * np.exp(np.outer(ii, log_x)) * (-1.0) ** ii[:, None]
        eHy = np.exp(np.multiply.outer(Hv, log_y))          # [N+1, ny]
        eHv0 = np.exp(np.multiply.outer(Hv, log_v0))        # [N+1, nx]
        eHr = np.exp(Hv * logr)
        yj = np.array(bin_n)[:, None] * np.exp(np.outer(ii, log_y)) * (-1.0) ** ii[:, None]
        ePGy = np.exp(np.multiply.outer(p * G, log_y))      # [N+1, ny]
        ePGv0 = np.exp(np.multiply.outer(p * G, log_v0))    # [N+1, nx]
        ePGr = np.exp(p * G * logr)
        out = np.zeros((len(log_x), len(log_y)), dtype=complex)
        notmask = ~mask
        for i in range(N + 1):
            u_fac = ((RG[i] - xG[i]) / G[i])[:, None]
            for j in range(N + 1):
                d3 = Hv[j] + p * G[i]
                p1 = np.where(notmask,
                              u_fac * ((eHv0[j][:, None] - eHy[j][None, :]) / Hv[j]),
                              0.0)
                vloH = np.where(mask, eHy[j][None, :], eHv0[j][:, None])
                vlod3 = np.where(mask, (eHy[j] * ePGy[i])[None, :],
                                 (eHv0[j] * ePGv0[i])[:, None])
                p2 = np.where(have2,
                              (RG[i] / G[i]) * ((eHr[j] - vloH) / Hv[j])
                              - (eHr[j] * ePGr[i] - vlod3) / (G[i] * d3),
                              0.0)
                out += (xi[i][:, None] * yj[j][None, :]) * (p1 + p2)
        return out

    def remainder_C(self, s: complex) -> complex:
        s = complex(s)
        if s.real <= -(self.N + 2.0) / self.b:
            raise HalfPlaneExceeded(s, -(self.N + 2.0) / self.b,
                                    hint="doubly-mixed remainder")
        xC, wxC, yC, wyC = self._C_nodes
        T = np.asarray(self._hC.eval(s)).reshape(len(xC), len(yC))
        W = self._c_weight(s)
        scale = (self.N + 1.0) ** 2
        return scale * complex((wxC[:, None] * wyC[None, :] * W * T).sum())

    def at(self, s: complex) -> ContinuationResult:
        s, nearest = self._guard(s)
        lead = self.leading(s)
        A = self.remainder_A_all(s)
        B = self.remainder_B_all(s)
        C = self.remainder_C(s)
        value = lead + A.sum() + B.sum() + C
        est = 1e3 * np.finfo(float).eps * (abs(lead) + float(np.abs(A).sum())
                                           + float(np.abs(B).sum()) + abs(C))
        return ContinuationResult(
            value=value,
            order_used=self.N,
            half_plane=self.abscissa,
            nearest_pole=nearest,
            remainder_estimate=est,
            binding_constraint=self.binding,
            parts={"leading": lead, "A": A.sum(), "B": B.sum(), "C": C},
        )


_PREP_CACHE: "weakref.WeakKeyDictionary[JetProvider2D, dict]" = weakref.WeakKeyDictionary()


def prepare_continuation(region: RegionD, a: int, b: int, jets: JetProvider2D,
                         N: int, cfg: QuadratureConfig = DEFAULT_CONFIG,
                         re_s_min: float | None = None,
                         u_features: Sequence[float] = (),
                         v_features: Sequence[float] = ()) -> PreparedContinuationH:
    try:
        per_provider = _PREP_CACHE.setdefault(jets, {})
    except TypeError:
        per_provider = None
    key = (region, a, b, N, cfg, re_s_min, tuple(u_features), tuple(v_features))
    if per_provider is not None and key in per_provider:
        return per_provider[key]
    prep = PreparedContinuationH(region, a, b, jets, N, cfg, re_s_min,
                                 u_features, v_features)
    if per_provider is not None:
        per_provider[key] = prep
    return prep


def continue_H(region: RegionD, a: int, b: int, jets: JetProvider2D, s: complex,
               N: int, cfg: QuadratureConfig = DEFAULT_CONFIG,
               re_s_min: float | None = None,
               u_features: Sequence[float] = (),
               v_features: Sequence[float] = ()) -> ContinuationResult:
    """Continued value of H(s) at expansion order N (see module docstring)."""
    prep = prepare_continuation(region, a, b, jets, N, cfg, re_s_min,
                                u_features, v_features)
    return prep.at(s)


def remainder_A(region: RegionD, a: int, b: int, jets: JetProvider2D,
                alpha: int, N: int, s: complex,
                cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """The v-direction Taylor-tail remainder attached to u^(as+alpha)."""
    prep = prepare_continuation(region, a, b, jets, N, cfg)
    return complex(prep.remainder_A_all(s)[alpha])


def remainder_B(region: RegionD, a: int, b: int, jets: JetProvider2D,
                beta: int, N: int, s: complex,
                cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """The u-direction Taylor-tail remainder attached to v^(bs+beta)."""
    prep = prepare_continuation(region, a, b, jets, N, cfg)
    return complex(prep.remainder_B_all(s)[beta])


def remainder_C(region: RegionD, a: int, b: int, jets: JetProvider2D,
                N: int, s: complex, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """The doubly-mixed remainder; holomorphic on Re(s) > -(N+2)/b."""
    prep = prepare_continuation(region, a, b, jets, N, cfg)
    return prep.remainder_C(s)


def quad_H_direct(region: RegionD, a: int, b: int, psi_value: Callable, s: complex,
                  cfg: QuadratureConfig = DEFAULT_CONFIG,
                  rel_tol: float = 1e-9) -> complex:
    """Direct iterated quadrature of H(s) for Re(s) > -1/b (oracle route)."""
    s = complex(s)
    p, r, R = region.p, region.r, region.R

    def outer(vs):
        vs = np.atleast_1d(np.asarray(vs, dtype=float))
        out = np.empty(vs.shape, dtype=complex)
        for i, v in enumerate(vs):
            lo = v ** p
            if lo >= R:
                out[i] = 0.0
                continue

            def inner(us):
                us = np.asarray(us, dtype=float)
                return np.exp(a * s * np.log(us)) * psi_value(us, v, s)

            if lo < 1e-12 * R:
                got = quad_power_endpoint(inner, R, a * s.real, cfg, rel_tol=rel_tol)
                if lo > 0.0:
                    cut = quad_power_endpoint(inner, lo, a * s.real, cfg, rel_tol=rel_tol)
                    out[i] = got.value - cut.value
                else:
                    out[i] = got.value
            else:
                got = adaptive_quad(inner, lo, R, cfg, rel_tol=rel_tol)
                out[i] = got.value
            out[i] *= np.exp(b * s * math.log(v)) if v > 0 else 0.0
        return out

    res = quad_power_endpoint(outer, r, b * s.real, cfg, rel_tol=rel_tol)
    return complex(res.value)
