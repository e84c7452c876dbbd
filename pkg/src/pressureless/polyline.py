"""Geometry of a discretized front: side classification and projection."""

from __future__ import annotations

import numpy as np


def segments(x, y, l, topology="open", shift=(0.0, 0.0)):
    """Segment endpoints ``(p0, p1, l0, l1)`` of a marker polyline.

    A periodic front with nonzero ``shift`` is an infinite curve; one ghost
    period is appended on each side so that queries near the seam see the
    neighbouring copy.
    """
    x, y, l = (np.asarray(v, dtype=float) for v in (x, y, l))
    if topology == "periodic":
        period = (l[1] - l[0]) * len(l)
        sx, sy = shift
        if sx == 0.0 and sy == 0.0:
            xs = np.append(x, x[0])
            ys = np.append(y, y[0])
            ls = np.append(l, l[0] + period)
        else:
            xs = np.concatenate([x - sx, x, x + sx, [x[0] + 2 * sx]])
            ys = np.concatenate([y - sy, y, y + sy, [y[0] + 2 * sy]])
            ls = np.concatenate([l - period, l, l + period, [l[0] + 2 * period]])
    else:
        xs, ys, ls = x, y, l
    p0 = np.stack([xs[:-1], ys[:-1]], axis=-1)
    p1 = np.stack([xs[1:], ys[1:]], axis=-1)
    return p0, p1, ls[:-1], ls[1:]


def project(qx, qy, x, y, l, topology="open", shift=(0.0, 0.0), chunk=4096):
    """Nearest point on the front for each query point.

    Returns ``(side, l_near, dist)``: ``side`` is +1 left of the front
    (minus side), -1 right of it (plus side) and 0 on it; ``l_near`` is the
    interpolated front parameter of the nearest point.
    """
    qx = np.atleast_1d(np.asarray(qx, dtype=float))
    qy = np.atleast_1d(np.asarray(qy, dtype=float))
    shape = np.broadcast_shapes(qx.shape, qy.shape)
    qx = np.broadcast_to(qx, shape).ravel()
    qy = np.broadcast_to(qy, shape).ravel()
    p0, p1, l0, l1 = segments(x, y, l, topology, shift)
    d = p1 - p0
    seg_len2 = np.einsum("ij,ij->i", d, d)
    seg_len2 = np.where(seg_len2 > 0, seg_len2, np.finfo(float).tiny)
    normal = np.stack([-d[:, 1], d[:, 0]], axis=-1) / np.sqrt(seg_len2)[:, None]
    # vertex pseudo-normals: sum of adjacent left normals
    vert_prev = np.zeros_like(normal)
    vert_prev[1:] = normal[:-1]
    vert_next = np.zeros_like(normal)
    vert_next[:-1] = normal[1:]

    side = np.empty(qx.shape)
    l_near = np.empty(qx.shape)
    dist = np.empty(qx.shape)
    for start in range(0, len(qx), chunk):
        sl = slice(start, start + chunk)
        rx = qx[sl, None] - p0[None, :, 0]
        ry = qy[sl, None] - p0[None, :, 1]
        s = (rx * d[None, :, 0] + ry * d[None, :, 1]) / seg_len2[None, :]
        s = np.clip(s, 0.0, 1.0)
        ex = rx - s * d[None, :, 0]
        ey = ry - s * d[None, :, 1]
        e2 = ex * ex + ey * ey
        k = np.argmin(e2, axis=1)
        rows = np.arange(len(k))
        sk = s[rows, k]
        exk, eyk = ex[rows, k], ey[rows, k]
        n = normal[k].copy()
        at_start = sk <= 0.0
        at_end = sk >= 1.0
        n[at_start] += vert_prev[k[at_start]]
        n[at_end] += vert_next[k[at_end]]
        sign = np.sign(exk * n[:, 0] + eyk * n[:, 1])
        side[sl] = sign
        l_near[sl] = l0[k] + sk * (l1[k] - l0[k])
        dist[sl] = np.sqrt(e2[rows, k])
    return side.reshape(shape), l_near.reshape(shape), dist.reshape(shape)


def interpolate(l_query, x, y, l, topology="open", shift=(0.0, 0.0)):
    """Piecewise-linear front position at parameters ``l_query``."""
    l = np.asarray(l, dtype=float)
    lq = np.asarray(l_query, dtype=float)
    if topology == "periodic":
        period = (l[1] - l[0]) * len(l)
        n_wrap = np.floor((lq - l[0]) / period)
        lr = lq - n_wrap * period
        ls = np.append(l, l[0] + period)
        xs = np.append(x, x[0] + shift[0])
        ys = np.append(y, y[0] + shift[1])
        return (np.interp(lr, ls, xs) + n_wrap * shift[0],
                np.interp(lr, ls, ys) + n_wrap * shift[1])
    return np.interp(lq, l, x), np.interp(lq, l, y)
