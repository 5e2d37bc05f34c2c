"""Hot loops: density search and quotient proximity.

Each kernel has a numba implementation and a pure-numpy implementation with
identical results.  ``SOL_LAB_DISABLE_JIT=1`` (or a missing numba) selects
numpy; :func:`use_jit` reports the active path.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

__all__ = [
    "NUMBA_AVAILABLE",
    "use_jit",
    "set_threads",
    "density_search",
    "coset_distances",
    "density_search_numpy",
    "coset_distances_numpy",
]


def use_jit() -> bool:
    flag = os.environ.get("SOL_LAB_DISABLE_JIT", "").strip().lower()
    return NUMBA_AVAILABLE and flag not in ("1", "true", "yes")


def set_threads(n: int | None) -> None:
    if n and NUMBA_AVAILABLE:
        numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def _signed_order(n: int) -> np.ndarray:
    """0, 1, -1, 2, -2, ..., n, -n."""
    out = np.zeros(2 * n + 1, dtype=np.int64)
    for k in range(1, n + 1):
        out[2 * k - 1] = k
        out[2 * k] = -k
    return out


# --- density ----------------------------------------------------------------
#
# For a target (X, Y, Z) and window (pmax, qmax, rmax) find integers with
#     |e^(Z - s r) (p + alpha q) - X| <= eps,   Y - e^-(Z - s r)(q + beta p) != 0.
# Search order is |r| ascending, then |q| ascending; p is the rounded solution
# clamped to the window.  The first admissible triple is returned.

if NUMBA_AVAILABLE:

    @njit(cache=True, parallel=True)
    def _density_search_jit(tx, ty, tz, alpha, beta, s, pmax, qmax, rmax, eps):
        n = tx.shape[0]
        hit = np.zeros(n, dtype=np.bool_)
        P = np.zeros(n, dtype=np.int64)
        Q = np.zeros(n, dtype=np.int64)
        R = np.zeros(n, dtype=np.int64)
        err = np.full(n, np.inf)
        for k in prange(n):
            found = False
            for ir in range(2 * rmax + 1):
                r = (ir + 1) // 2 if ir % 2 == 1 else -(ir // 2)
                z = tz[k] - s * r
                c = math.exp(z)
                for iq in range(2 * qmax + 1):
                    q = (iq + 1) // 2 if iq % 2 == 1 else -(iq // 2)
                    p = np.rint(tx[k] / c - q * alpha)
                    if p > pmax:
                        p = pmax
                    elif p < -pmax:
                        p = -pmax
                    e = abs(c * (p + q * alpha) - tx[k])
                    if e < err[k]:
                        err[k] = e
                    if e <= eps:
                        y = ty[k] - (q + beta * p) / c
                        if y != 0.0:
                            hit[k] = True
                            P[k] = np.int64(p)
                            Q[k] = q
                            R[k] = r
                            err[k] = e
                            found = True
                            break
                if found:
                    break
        return hit, P, Q, R, err


def density_search_numpy(tx, ty, tz, alpha, beta, s, pmax, qmax, rmax, eps):
    tx = np.asarray(tx, dtype=float)
    ty = np.asarray(ty, dtype=float)
    tz = np.asarray(tz, dtype=float)
    n = tx.shape[0]
    hit = np.zeros(n, dtype=bool)
    P = np.zeros(n, dtype=np.int64)
    Q = np.zeros(n, dtype=np.int64)
    R = np.zeros(n, dtype=np.int64)
    err = np.full(n, np.inf)
    # keep the r/q visiting order of the compiled kernel
    q_order = _signed_order(qmax)
    for r in _signed_order(rmax):
        if hit.all():
            break
        c = np.exp(tz - s * r)
        for q in q_order:
            idx = np.nonzero(~hit)[0]
            if idx.size == 0:
                break
            ck = c[idx]
            p = np.clip(np.rint(tx[idx] / ck - q * alpha), -pmax, pmax)
            e = np.abs(ck * (p + q * alpha) - tx[idx])
            err[idx] = np.minimum(err[idx], e)
            y = ty[idx] - (q + beta * p) / ck
            ok = (e <= eps) & (y != 0.0)
            sel = idx[ok]
            hit[sel] = True
            P[sel] = p[ok].astype(np.int64)
            Q[sel] = q
            R[sel] = r
            err[sel] = e[ok]
    return hit, P, Q, R, err


def density_search(tx, ty, tz, alpha, beta, s, pmax, qmax, rmax, eps):
    """Per-target ``(hit, p, q, r, err)``; ``err`` is the best x-error seen."""
    args = (
        np.ascontiguousarray(tx, dtype=np.float64),
        np.ascontiguousarray(ty, dtype=np.float64),
        np.ascontiguousarray(tz, dtype=np.float64),
        float(alpha),
        float(beta),
        float(s),
        int(pmax),
        int(qmax),
        int(rmax),
        float(eps),
    )
    if use_jit():
        return _density_search_jit(*args)
    return density_search_numpy(*args)


# --- proximity to lattice cosets ------------------------------------------
#
# For curve samples c and coset representatives b, the distance from c to the
# coset b Gamma is estimated by the first-order metric at c applied to c - b g,
# with g the lattice element obtained by rounding b^-1 c in lattice
# coordinates (four integer neighbours of P^-1(xy), nearest r).

if NUMBA_AVAILABLE:

    @njit(cache=True)
    def _coset_distances_jit(samples, bpts, P, Pinv, s):
        n = samples.shape[0]
        m = bpts.shape[0]
        best = np.full(n, np.inf)
        arg = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            cx = samples[i, 0]
            cy = samples[i, 1]
            cz = samples[i, 2]
            wx = math.exp(-2.0 * cz)
            wy = math.exp(2.0 * cz)
            for j in range(m):
                bx = bpts[j, 0]
                by = bpts[j, 1]
                bz = bpts[j, 2]
                eb = math.exp(bz)
                dx = (cx - bx) / eb
                dy = (cy - by) * eb
                dz = cz - bz
                r = np.rint(dz / s)
                pf = Pinv[0, 0] * dx + Pinv[0, 1] * dy
                qf = Pinv[1, 0] * dx + Pinv[1, 1] * dy
                for p in (math.floor(pf), math.ceil(pf)):
                    for q in (math.floor(qf), math.ceil(qf)):
                        X = P[0, 0] * p + P[0, 1] * q
                        Y = P[1, 0] * p + P[1, 1] * q
                        ex = cx - (bx + eb * X)
                        ey = cy - (by + Y / eb)
                        ez = cz - (bz + s * r)
                        d = math.sqrt(wx * ex * ex + wy * ey * ey + ez * ez)
                        if d < best[i]:
                            best[i] = d
                            arg[i] = j
        return best, arg


def coset_distances_numpy(samples, bpts, P, Pinv, s):
    samples = np.asarray(samples, dtype=float)
    bpts = np.asarray(bpts, dtype=float)
    n = samples.shape[0]
    best = np.full(n, np.inf)
    arg = np.full(n, -1, dtype=np.int64)
    cx, cy, cz = samples[:, 0], samples[:, 1], samples[:, 2]
    wx, wy = np.exp(-2.0 * cz), np.exp(2.0 * cz)
    for j, (bx, by, bz) in enumerate(bpts):
        eb = math.exp(bz)
        dx = (cx - bx) / eb
        dy = (cy - by) * eb
        r = np.rint((cz - bz) / s)
        pf = Pinv[0, 0] * dx + Pinv[0, 1] * dy
        qf = Pinv[1, 0] * dx + Pinv[1, 1] * dy
        for p in (np.floor(pf), np.ceil(pf)):
            for q in (np.floor(qf), np.ceil(qf)):
                X = P[0, 0] * p + P[0, 1] * q
                Y = P[1, 0] * p + P[1, 1] * q
                ex = cx - (bx + eb * X)
                ey = cy - (by + Y / eb)
                ez = cz - (bz + s * r)
                d = np.sqrt(wx * ex * ex + wy * ey * ey + ez * ez)
                better = d < best
                best[better] = d[better]
                arg[better] = j
    return best, arg


def coset_distances(samples, bpts, P, Pinv, s):
    """Per-sample minimal distance to the cosets of ``bpts`` and the argmin."""
    samples = np.ascontiguousarray(samples, dtype=np.float64).reshape(-1, 3)
    bpts = np.ascontiguousarray(bpts, dtype=np.float64).reshape(-1, 3)
    P = np.ascontiguousarray(P, dtype=np.float64)
    Pinv = np.ascontiguousarray(Pinv, dtype=np.float64)
    if bpts.shape[0] == 0:
        return np.full(samples.shape[0], np.inf), np.full(samples.shape[0], -1, dtype=np.int64)
    if use_jit():
        return _coset_distances_jit(samples, bpts, P, Pinv, float(s))
    return coset_distances_numpy(samples, bpts, P, Pinv, float(s))
