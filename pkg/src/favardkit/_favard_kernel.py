"""Certified per-panel enclosures for directional projection measures.

A square set's projection at angle theta is a union of intervals whose
endpoints are sinusoids A*cos(theta) + B*sin(theta).  Over an angle panel
[a, b] this module propagates interval components carrying exact sinusoid
endpoint forms plus pad intervals; pads widen only where a merge decision
(gap/overlap, endpoint winner) cannot be certified over the whole panel.
Panels with no such event integrate exactly; the certified error is the
integral of the pad widths plus gap ambiguity.

Component record layout (columns of a 10 x capacity float64 buffer):
  0 Alo, 1 Blo   lo(theta) = Alo*cos + Blo*sin + pad, pad in [plo0, plo1]
  2 plo0, 3 plo1
  4 Ahi, 5 Bhi   hi(theta) analogous
  6 phi0, 7 phi1
  8 gsub         internal gap estimate subtracted from the measure
  9 gerr         half-width of the internal gap uncertainty

The four-corner Cantor product admits a self-similar recursion: its
projection at generation g is the union of four quarter-scale translates of
generation g-1, with translation offsets that are themselves exact
sinusoids.  cantor_panel exploits this; flat_panel handles an arbitrary
pre-sorted record list.

Sweep soundness depends on records arriving in key order.  Lowering a lo
pad during a merge can push an emitted component's key slightly below its
predecessor's, so the sweep also reports the largest such drop and the
caller threads a certified disorder bound through the recursion; the close
test subtracts it.

Rounding control: every sinusoid range is widened outward by _EPS, and the
final integral carries a per-component allowance _INT_SLOP; coefficients on
dyadic grids are exact by construction.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_EPS = 4e-15
_INT_SLOP_BASE = 1e-14
_INT_SLOP_PER = 4e-16

NFIELDS = 10

_OFF = np.array([[0.0, 0.0], [0.0, 0.75], [0.75, 0.0], [0.75, 0.75]], dtype=np.float64)


@njit(cache=True, nogil=True, inline="always")
def _rng_lo(A, B, ca, sa, cb, sb):
    fa = A * ca + B * sa
    fb = A * cb + B * sb
    lo = fa if fa < fb else fb
    da = B * ca - A * sa
    db = B * cb - A * sb
    if da <= 0.0 and db >= 0.0:
        lo = -math.sqrt(A * A + B * B)
    return lo - _EPS


@njit(cache=True, nogil=True, inline="always")
def _rng_hi(A, B, ca, sa, cb, sb):
    fa = A * ca + B * sa
    fb = A * cb + B * sb
    hi = fa if fa > fb else fb
    da = B * ca - A * sa
    db = B * cb - A * sb
    if da >= 0.0 and db <= 0.0:
        hi = math.sqrt(A * A + B * B)
    return hi + _EPS


@njit(cache=True, nogil=True)
def _sweep(src, order, cnt, maxspread, disorder, out, ca, sa, cb, sb, cm, sm):
    """Merge a near-key-sorted record sequence into certified components.

    src holds NFIELDS x n records, order gives the visit sequence (sorted up
    to the certified disorder bound).  Returns (count, maxdrop) where count
    is the components written to out (-1 on capacity overflow) and maxdrop
    the largest lo-pad lowering applied, which feeds the caller's disorder
    bound for the next sweep.
    """
    maxc = out.shape[1]
    nout = 0
    maxdrop = 0.0
    # current component scalars
    c_alo = 0.0; c_blo = 0.0; c_p0 = 0.0; c_p1 = 0.0
    c_ahi = 0.0; c_bhi = 0.0; c_q0 = 0.0; c_q1 = 0.0
    c_gs = 0.0; c_ge = 0.0
    c_himax = 0.0
    started = False
    for oi in range(cnt):
        t = order[oi]
        alo = src[0, t]; blo = src[1, t]; p0 = src[2, t]; p1 = src[3, t]
        ahi = src[4, t]; bhi = src[5, t]; q0 = src[6, t]; q1 = src[7, t]
        gs = src[8, t]; ge = src[9, t]
        key = alo * cm + blo * sm + 0.5 * (p0 + p1)
        himax = _rng_hi(ahi, bhi, ca, sa, cb, sb) + q1
        if not started:
            c_alo, c_blo, c_p0, c_p1 = alo, blo, p0, p1
            c_ahi, c_bhi, c_q0, c_q1 = ahi, bhi, q0, q1
            c_gs, c_ge = gs, ge
            c_himax = himax
            started = True
            continue
        if key - disorder - maxspread > c_himax:
            # all later records clear the current component: close it
            if nout >= maxc:
                return -1, maxdrop
            out[0, nout] = c_alo; out[1, nout] = c_blo
            out[2, nout] = c_p0; out[3, nout] = c_p1
            out[4, nout] = c_ahi; out[5, nout] = c_bhi
            out[6, nout] = c_q0; out[7, nout] = c_q1
            out[8, nout] = c_gs; out[9, nout] = c_ge
            nout += 1
            c_alo, c_blo, c_p0, c_p1 = alo, blo, p0, p1
            c_ahi, c_bhi, c_q0, c_q1 = ahi, bhi, q0, q1
            c_gs, c_ge = gs, ge
            c_himax = himax
            continue
        # merge the record into the current component
        # possible internal gap: d = lo_v - hi_cur over the panel
        dA = alo - c_ahi
        dB = blo - c_bhi
        d_min = _rng_lo(dA, dB, ca, sa, cb, sb) + p0 - c_q1
        d_max = _rng_hi(dA, dB, ca, sa, cb, sb) + p1 - c_q0
        g_hi = d_max if d_max > 0.0 else 0.0
        g_lo = d_min if d_min > 0.0 else 0.0
        c_gs += 0.5 * (g_hi + g_lo) + gs
        c_ge += 0.5 * (g_hi - g_lo) + ge
        # lo endpoint: current stays unless the record can dip below it
        fA = alo - c_alo
        fB = blo - c_blo
        f_min = _rng_lo(fA, fB, ca, sa, cb, sb) + p0 - c_p1
        if f_min < 0.0:
            c_p0 += f_min
            if -f_min > maxdrop:
                maxdrop = -f_min
        # hi endpoint: keep the certified winner, else pad the likelier one
        eA = ahi - c_ahi
        eB = bhi - c_bhi
        e_min = _rng_lo(eA, eB, ca, sa, cb, sb) + q0 - c_q1
        e_max = _rng_hi(eA, eB, ca, sa, cb, sb) + q1 - c_q0
        if e_min >= 0.0:
            c_ahi, c_bhi, c_q0, c_q1 = ahi, bhi, q0, q1
        elif e_max <= 0.0:
            pass
        elif e_min + e_max > 0.0:
            over = -e_min
            c_ahi, c_bhi, c_q0, c_q1 = ahi, bhi, q0, q1 + over
        else:
            if e_max > 0.0:
                c_q1 += e_max
        if himax > c_himax:
            c_himax = himax
    if started:
        if nout >= maxc:
            return -1, maxdrop
        out[0, nout] = c_alo; out[1, nout] = c_blo
        out[2, nout] = c_p0; out[3, nout] = c_p1
        out[4, nout] = c_ahi; out[5, nout] = c_bhi
        out[6, nout] = c_q0; out[7, nout] = c_q1
        out[8, nout] = c_gs; out[9, nout] = c_ge
        nout += 1
    return nout, maxdrop


@njit(cache=True, nogil=True)
def _integrate(buf, cnt, a, b):
    """Certified (estimate, error) of the integral of the union measure over [a, b]."""
    h = b - a
    sa = math.sin(a); ca = math.cos(a)
    sb = math.sin(b); cb = math.cos(b)
    est = 0.0
    err = 0.0
    for i in range(cnt):
        dA = buf[4, i] - buf[0, i]
        dB = buf[5, i] - buf[1, i]
        est += dA * (sb - sa) + dB * (ca - cb)
        est += h * (0.5 * (buf[6, i] + buf[7, i]) - 0.5 * (buf[2, i] + buf[3, i]) - buf[8, i])
        err += h * (0.5 * (buf[7, i] - buf[6, i]) + 0.5 * (buf[3, i] - buf[2, i]) + buf[9, i])
    err += h * (_INT_SLOP_BASE + _INT_SLOP_PER * cnt)
    return est, err


@njit(cache=True, nogil=True)
def cantor_panel(n, a, b, buf0, buf1, buf2, order):
    """Certified integral of the generation-n projection measure over [a, b].

    Requires [a, b] inside [0, pi/2) (nonnegative cosine and sine).  buf0 and
    buf1 are NFIELDS x capacity ping-pong buffers, buf2 a same-shape scratch
    for translated records, order an int64 scratch of the same capacity.
    Returns (est, err, components); components = -1 flags capacity overflow.
    """
    ca = math.cos(a); sa = math.sin(a)
    cb = math.cos(b); sb = math.sin(b)
    tm = 0.5 * (a + b)
    cm = math.cos(tm); sm = math.sin(tm)
    IN = buf0
    OUT = buf1
    IN[0, 0] = 0.0; IN[1, 0] = 0.0; IN[2, 0] = 0.0; IN[3, 0] = 0.0
    IN[4, 0] = 1.0; IN[5, 0] = 1.0; IN[6, 0] = 0.0; IN[7, 0] = 0.0
    IN[8, 0] = 0.0; IN[9, 0] = 0.0
    cnt = 1
    disorder = 0.0
    maxc = buf0.shape[1]
    for _level in range(n):
        total = 4 * cnt
        if total > maxc:
            return 0.0, 0.0, -1
        # expand: four quarter-scale translates, offsets are exact sinusoids
        maxspread = 0.0
        pos = 0
        for j in range(4):
            al = _OFF[j, 0]
            be = _OFF[j, 1]
            for t in range(cnt):
                alo = IN[0, t] * 0.25 + al
                blo = IN[1, t] * 0.25 + be
                p0 = IN[2, t] * 0.25
                p1 = IN[3, t] * 0.25
                buf2[0, pos] = alo; buf2[1, pos] = blo
                buf2[2, pos] = p0; buf2[3, pos] = p1
                buf2[4, pos] = IN[4, t] * 0.25 + al
                buf2[5, pos] = IN[5, t] * 0.25 + be
                buf2[6, pos] = IN[6, t] * 0.25
                buf2[7, pos] = IN[7, t] * 0.25
                buf2[8, pos] = IN[8, t] * 0.25
                buf2[9, pos] = IN[9, t] * 0.25
                key = alo * cm + blo * sm + 0.5 * (p0 + p1)
                lomin = _rng_lo(alo, blo, ca, sa, cb, sb) + p0
                sp = key - lomin
                if sp > maxspread:
                    maxspread = sp
                pos += 1
        # 4-way ordered merge of the translated blocks (each block key-sorted)
        i0 = 0; i1 = cnt; i2 = 2 * cnt; i3 = 3 * cnt
        e0 = cnt; e1 = 2 * cnt; e2 = 3 * cnt; e3 = 4 * cnt
        k0 = _reckey(buf2, i0, cm, sm) if i0 < e0 else np.inf
        k1 = _reckey(buf2, i1, cm, sm) if i1 < e1 else np.inf
        k2 = _reckey(buf2, i2, cm, sm) if i2 < e2 else np.inf
        k3 = _reckey(buf2, i3, cm, sm) if i3 < e3 else np.inf
        for w in range(total):
            if k0 <= k1 and k0 <= k2 and k0 <= k3:
                order[w] = i0; i0 += 1
                k0 = _reckey(buf2, i0, cm, sm) if i0 < e0 else np.inf
            elif k1 <= k2 and k1 <= k3:
                order[w] = i1; i1 += 1
                k1 = _reckey(buf2, i1, cm, sm) if i1 < e1 else np.inf
            elif k2 <= k3:
                order[w] = i2; i2 += 1
                k2 = _reckey(buf2, i2, cm, sm) if i2 < e2 else np.inf
            else:
                order[w] = i3; i3 += 1
                k3 = _reckey(buf2, i3, cm, sm) if i3 < e3 else np.inf
        newcnt, maxdrop = _sweep(
            buf2, order, total, maxspread, disorder, OUT, ca, sa, cb, sb, cm, sm
        )
        if newcnt < 0:
            return 0.0, 0.0, -1
        # emitted keys may trail their predecessors by up to half the largest
        # pad drop; the quarter-scale translation contracts the bound
        disorder = 0.25 * (disorder + 0.5 * maxdrop)
        tmp = IN
        IN = OUT
        OUT = tmp
        cnt = newcnt
    est, err = _integrate(IN, cnt, a, b)
    return est, err, cnt


@njit(cache=True, nogil=True, inline="always")
def _reckey(buf, i, cm, sm):
    return buf[0, i] * cm + buf[1, i] * sm + 0.5 * (buf[2, i] + buf[3, i])


@njit(cache=True, nogil=True)
def flat_panel(recs, a, b, out, order):
    """Certified integral for an explicit record list (any square set).

    recs must be key-sorted at the panel midpoint.  order is int64 scratch of
    the record count.  Returns (est, err, components); -1 on overflow.
    """
    ca = math.cos(a); sa = math.sin(a)
    cb = math.cos(b); sb = math.sin(b)
    tm = 0.5 * (a + b)
    cm = math.cos(tm); sm = math.sin(tm)
    cnt = recs.shape[1]
    maxspread = 0.0
    for t in range(cnt):
        key = _reckey(recs, t, cm, sm)
        lomin = _rng_lo(recs[0, t], recs[1, t], ca, sa, cb, sb) + recs[2, t]
        sp = key - lomin
        if sp > maxspread:
            maxspread = sp
        order[t] = t
    ncomp, _ = _sweep(recs, order, cnt, maxspread, 0.0, out, ca, sa, cb, sb, cm, sm)
    if ncomp < 0:
        return 0.0, 0.0, -1
    est, err = _integrate(out, ncomp, a, b)
    return est, err, ncomp
