"""Truncated Taylor-jet arithmetic, univariate and bivariate, batched.

A univariate jet of order M-1 is an array ``a[..., M]`` of normalized Taylor
coefficients ``a_k = f^(k)(x0) / k!``; a bivariate jet is ``a[..., M1, M2]``
with ``a_{ij} = d^{i+j} f / (i! j! dx^i dy^j)``.  Leading axes are broadcast
batch axes, so one call evaluates jets at many base points at once.

Everything here is plain series algebra: Cauchy products, series division,
exp and complex-power recurrences, and the exact jets of the building-block
smooth cutoff ``t -> exp(-1/t)`` from which all bump functions are assembled.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "jet_mul",
    "jet_div",
    "jet_exp",
    "jet_pow",
    "jet_mul2",
    "jet_pow2",
    "jet_powers",
    "compose_1d_with_2d",
    "binom_complex",
    "exp_neg_inv_jet",
    "smoothstep_value",
    "smoothstep_jet",
    "plateau_jet",
    "recip_power_jet",
]

# Evaluation floor: exp(-1/t) underflows to exactly 0.0 well above this, so
# jets at smaller t are identically zero without touching huge 1/t powers.
_EXP_T_FLOOR = 1e-4


def jet_mul(a, b):
    """Cauchy product of univariate jets (truncated to the common order)."""
    a = np.asarray(a)
    b = np.asarray(b)
    m = min(a.shape[-1], b.shape[-1])
    out = np.zeros(np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (m,),
                   dtype=np.result_type(a, b))
    for k in range(m):
        out[..., k:] += a[..., k:k + 1] * b[..., : m - k]
    return out


def jet_div(a, b):
    """Series division a/b; requires b[..., 0] != 0."""
    a = np.asarray(a)
    b = np.asarray(b)
    m = min(a.shape[-1], b.shape[-1])
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (m,)
    out = np.zeros(shape, dtype=np.result_type(a, b, float))
    b0 = b[..., 0]
    out[..., 0] = a[..., 0] / b0
    for n in range(1, m):
        acc = a[..., n].astype(out.dtype).copy()
        acc = acc - np.sum(out[..., :n] * b[..., n:0:-1], axis=-1)
        out[..., n] = acc / b0
    return out


def jet_exp(a):
    """exp of a univariate jet."""
    a = np.asarray(a)
    m = a.shape[-1]
    out = np.zeros(a.shape, dtype=np.result_type(a, float))
    out[..., 0] = np.exp(a[..., 0])
    ks = np.arange(1, m)
    for n in range(1, m):
        k = ks[:n]
        out[..., n] = np.sum(k * a[..., 1:n + 1] * out[..., n - 1::-1][..., :n], axis=-1) / n
    return out


def jet_pow(a, s):
    """a^s for a univariate jet with a[..., 0] != 0 (principal branch)."""
    a = np.asarray(a)
    m = a.shape[-1]
    dtype = complex if (np.iscomplexobj(a) or isinstance(s, complex)) else float
    out = np.zeros(a.shape, dtype=dtype)
    a0 = a[..., 0]
    out[..., 0] = a0 ** s if dtype is float else np.asarray(a0, dtype=complex) ** s
    for n in range(1, m):
        k = np.arange(1, n + 1)
        coef = (s + 1) * k - n
        out[..., n] = np.sum(coef * a[..., 1:n + 1] * out[..., n - 1::-1][..., :n], axis=-1) / (n * a0)
    return out


def jet_mul2(a, b):
    """Product of bivariate jets, truncated to the common orders."""
    a = np.asarray(a)
    b = np.asarray(b)
    m1 = min(a.shape[-2], b.shape[-2])
    m2 = min(a.shape[-1], b.shape[-1])
    shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2]) + (m1, m2)
    out = np.zeros(shape, dtype=np.result_type(a, b))
    for i in range(m1):
        for j in range(m2):
            out[..., i:, j:] += a[..., i:i + 1, j:j + 1] * b[..., : m1 - i, : m2 - j]
    return out


def jet_pow2(a, s):
    """a^s for a bivariate jet with a[..., 0, 0] != 0.

    The recurrence runs along the first jet axis with coefficients that are
    univariate jets along the second axis.
    """
    a = np.asarray(a)
    m1, m2 = a.shape[-2], a.shape[-1]
    dtype = complex if (np.iscomplexobj(a) or isinstance(s, complex)) else float
    out = np.zeros(a.shape[:-2] + (m1, m2), dtype=dtype)
    a0 = a[..., 0, :]
    out[..., 0, :] = jet_pow(a0, s)
    for n in range(1, m1):
        acc = np.zeros(out.shape[:-2] + (m2,), dtype=dtype)
        for k in range(1, n + 1):
            acc = acc + ((s + 1) * k - n) * jet_mul(a[..., k, :], out[..., n - k, :])
        out[..., n, :] = jet_div(acc, n * a0)
    return out


def jet_powers(g, kmax):
    """[1, g, g^2, ..., g^kmax] for a bivariate jet g (batched)."""
    g = np.asarray(g)
    one = np.zeros_like(g)
    one[..., 0, 0] = 1.0
    out = [one]
    for _ in range(kmax):
        out.append(jet_mul2(out[-1], g))
    return out


def compose_1d_with_2d(outer, inner):
    """Jet of f(g(x, y)) from the 1-D jet of f at g(x0,y0) and the 2-D jet of g.

    ``outer[..., K+1]`` are coefficients of f at the inner constant term;
    ``inner[..., M1, M2]`` is the jet of g.  Horner evaluation in the jet ring.
    """
    outer = np.asarray(outer)
    inner = np.asarray(inner)
    delta = inner.copy()
    delta[..., 0, 0] = 0.0
    kmax = outer.shape[-1] - 1
    shape = np.broadcast_shapes(outer.shape[:-1], inner.shape[:-2]) + inner.shape[-2:]
    res = np.zeros(shape, dtype=np.result_type(outer, inner))
    res[..., 0, 0] = outer[..., kmax]
    for k in range(kmax - 1, -1, -1):
        res = jet_mul2(res, delta)
        res[..., 0, 0] += outer[..., k]
    return res


def binom_complex(s, kmax):
    """[binom(s, 0), ..., binom(s, kmax)] for complex s."""
    out = np.empty(kmax + 1, dtype=complex)
    out[0] = 1.0
    for k in range(1, kmax + 1):
        out[k] = out[k - 1] * (s - (k - 1)) / k
    return out


def recip_power_jet(j, x0, m):
    """Jet of x^(-j) at x0 > 0 (batched over x0), j >= 1."""
    x0 = np.asarray(x0, dtype=float)
    out = np.empty(x0.shape + (m,), dtype=float)
    coef = 1.0
    for i in range(m):
        # (-1)^i * binom(j+i-1, i) * x0^(-j-i)
        out[..., i] = coef * x0 ** (-(j + i))
        coef *= -(j + i) / (i + 1.0)
    return out


def exp_neg_inv_jet(t, m):
    """Jet of t -> exp(-1/t) (0 for t <= 0) at base points t (batched)."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros(t.shape + (m,), dtype=float)
    live = t > _EXP_T_FLOOR
    if np.any(live):
        tl = t[live]
        a = np.zeros(tl.shape + (m,), dtype=float)
        sign = -1.0
        for k in range(m):
            a[..., k] = sign * tl ** (-(k + 1))
            sign = -sign
        out[live] = jet_exp(a)
    return out[0] if scalar else out


def _mirror(jets):
    """Jet of t -> f(c - t) from the jet of f at c - t0 (coefficient signs)."""
    out = jets.copy()
    out[..., 1::2] *= -1.0
    return out


def smoothstep_value(t):
    """The standard smooth step: 0 for t <= 0, 1 for t >= 1, C-infinity."""
    t = np.asarray(t, dtype=float)
    g1 = np.where(t > _EXP_T_FLOOR, np.exp(-1.0 / np.maximum(t, _EXP_T_FLOOR)), 0.0)
    g2 = np.where(1.0 - t > _EXP_T_FLOOR,
                  np.exp(-1.0 / np.maximum(1.0 - t, _EXP_T_FLOOR)), 0.0)
    den = g1 + g2
    den = np.where(den == 0.0, 1.0, den)
    return g1 / den


def smoothstep_jet(t, m):
    """Jet of the standard smooth step at base points t (batched)."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    g1 = exp_neg_inv_jet(t, m)
    g2 = _mirror(exp_neg_inv_jet(1.0 - t, m))
    den = g1 + g2
    out = np.zeros_like(g1)
    ok = den[..., 0] != 0.0
    if np.any(ok):
        out[ok] = jet_div(g1[ok], den[ok])
    # both branches underflowed: deep plateau, value is 0 or 1 by side
    bad = ~ok
    if np.any(bad):
        out[bad, 0] = (t[bad] >= 0.5).astype(float)
    return out[0] if scalar else out


def plateau_jet(t, inner, outer, m):
    """Jet of the plateau profile P(t) = step((outer - |t|)/(outer - inner)).

    P is 1 on [-inner, inner], 0 outside (-outer, outer), smooth and even.
    ``inner == outer == inf`` denotes the constant-1 profile.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if math.isinf(outer):
        out = np.zeros(t.shape + (m,), dtype=float)
        out[..., 0] = 1.0
        return out[0] if scalar else out
    delta = outer - inner
    if delta <= 0:
        raise ValueError("plateau profile needs inner < outer")
    w = (outer - np.abs(t)) / delta
    out = smoothstep_jet(w, m)
    scale = np.cumprod(np.full(m - 1, -1.0 / delta))
    out[..., 1:] *= scale
    neg = t < 0
    if np.any(neg):
        out[neg] = _mirror(out[neg])
    return out[0] if scalar else out
