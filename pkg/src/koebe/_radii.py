"""Radii solver kernels.

Two engines compute the radii vector of a circle packing:

* ``solve_gap`` -- the constructive angle-sum iteration: pick the threshold
  with the largest gap in the sorted deficit values, shrink the radii below
  the threshold by a common factor chosen to close that gap, renormalize.
  Energy (sum of squared deficits) decreases strictly every step.
* ``solve_flower`` -- damped uniform-neighbor fixed point; much faster on
  large inputs and, by uniqueness of the radii vector, it converges to the
  same answer.  Used as the fast path for big probe instances.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _deficits(r, i0, i1, i2, target, sig):
    n = r.shape[0]
    for v in range(n):
        sig[v] = -target[v]
    for f in range(i0.shape[0]):
        r0 = r[i0[f]]
        r1 = r[i1[f]]
        r2 = r[i2[f]]
        c0 = 1.0 - 2.0 * r1 * r2 / ((r1 + r0) * (r0 + r2))
        c1 = 1.0 - 2.0 * r0 * r2 / ((r0 + r1) * (r1 + r2))
        if c0 > 1.0:
            c0 = 1.0
        elif c0 < -1.0:
            c0 = -1.0
        if c1 > 1.0:
            c1 = 1.0
        elif c1 < -1.0:
            c1 = -1.0
        a0 = math.acos(c0)
        a1 = math.acos(c1)
        a2 = math.pi - a0 - a1
        sig[i0[f]] += a0
        sig[i1[f]] += a1
        sig[i2[f]] += a2


@njit(cache=True, nogil=True)
def _gap_value(r, lam, in_s, i0, i1, i2, target, sig, rwork):
    n = r.shape[0]
    for v in range(n):
        rwork[v] = r[v] if in_s[v] else r[v] * lam
    _deficits(rwork, i0, i1, i2, target, sig)
    mn = 1e300
    mx = -1e300
    for v in range(n):
        if in_s[v]:
            if sig[v] < mn:
                mn = sig[v]
        else:
            if sig[v] > mx:
                mx = sig[v]
    return mn - mx


@njit(cache=True, nogil=True)
def solve_gap(i0, i1, i2, target, r_init, tol, max_iter, gap_rtol):
    """Max-gap iteration.

    Returns (r, iters, energies, lambdas, status); status 0 on convergence,
    1 when max_iter ran out.
    """
    n = r_init.shape[0]
    r = r_init.copy()
    sig = np.empty(n)
    rwork = np.empty(n)
    energies = np.empty(max_iter + 1)
    lambdas = np.empty(max_iter)
    eps_prev = 0.25
    it = 0
    while True:
        _deficits(r, i0, i1, i2, target, sig)
        E = 0.0
        for v in range(n):
            E += sig[v] * sig[v]
        energies[it] = E
        if E <= tol:
            return r, it, energies[: it + 1], lambdas[:it], 0
        if it >= max_iter:
            return r, it, energies[: it + 1], lambdas[:it], 1

        # threshold with the maximal gap in the sorted deficits
        ds = np.sort(sig)
        best = -1.0
        s = 0.0
        for j in range(n - 1):
            g = ds[j + 1] - ds[j]
            if g > best:
                best = g
                s = ds[j]
        gap0 = best
        in_s = sig > s

        # bracket the gap-closing lambda = 1 - eps, warm-started scale
        eps = eps_prev
        lo = -1.0
        hi = 1.0
        glo = 0.0
        for _ in range(100):
            if eps > 0.999999999:
                eps = 0.999999999
            lam = 1.0 - eps
            g = _gap_value(r, lam, in_s, i0, i1, i2, target, sig, rwork)
            if g <= 0.0:
                lo = lam
                glo = g
                break
            hi = lam
            if eps >= 0.999999998:
                break
            eps *= 4.0
        if lo < 0.0:
            lam = 1.0 - eps  # no sign change: smallest probed lambda
        else:
            ghi = gap0
            if hi < 1.0:
                ghi = _gap_value(r, hi, in_s, i0, i1, i2, target, sig, rwork)
            # regula falsi with bisection fallback, stop at relative closure
            lam = lo
            for _ in range(80):
                if -glo <= gap_rtol * gap0 or (hi - lo) <= 1e-18:
                    break
                denom = ghi - glo
                if denom > 0.0:
                    mid = lo - glo * (hi - lo) / denom
                    w = hi - lo
                    if mid <= lo + 0.02 * w:
                        mid = lo + 0.02 * w
                    elif mid >= hi - 0.02 * w:
                        mid = hi - 0.02 * w
                else:
                    mid = 0.5 * (lo + hi)
                gm = _gap_value(r, mid, in_s, i0, i1, i2, target, sig, rwork)
                if gm <= 0.0:
                    lo = mid
                    glo = gm
                else:
                    hi = mid
                    ghi = gm
                lam = lo
        eps_prev = 1.0 - lam
        if eps_prev < 1e-300:
            eps_prev = 1e-300
        lambdas[it] = lam
        tot = 0.0
        for v in range(n):
            if not in_s[v]:
                r[v] *= lam
            tot += r[v]
        for v in range(n):
            r[v] /= tot
        it += 1


def solve_flower(i0, i1, i2, target, faces_at, r_init, tol, max_iter):
    """Uniform-neighbor fixed-point sweeps (vectorized).

    Each sweep replaces r_v by the radius whose uniform-neighbor flower
    would produce the target angle sum, given the effective neighbor radius
    implied by the current angle sum.
    """
    n = r_init.shape[0]
    r = r_init.copy()
    m = faces_at
    s_star = np.sin(target / (2.0 * m))
    factor = (1.0 - s_star) / s_star
    energies = []
    for it in range(max_iter):
        r0, r1, r2 = r[i0], r[i1], r[i2]
        a0 = np.arccos(np.clip(1 - 2 * r1 * r2 / ((r1 + r0) * (r0 + r2)), -1, 1))
        a1 = np.arccos(np.clip(1 - 2 * r0 * r2 / ((r0 + r1) * (r1 + r2)), -1, 1))
        a2 = np.pi - a0 - a1
        sig = np.bincount(i0, weights=a0, minlength=n)
        sig += np.bincount(i1, weights=a1, minlength=n)
        sig += np.bincount(i2, weights=a2, minlength=n)
        d = sig - target
        E = float(d @ d)
        energies.append(E)
        if E <= tol:
            return r / r.sum(), it, energies, 0
        s_hat = np.sin(sig / (2.0 * m))
        r_hat = r * s_hat / (1.0 - s_hat)
        r = r_hat * factor
        r /= r.sum()
    return r / r.sum(), max_iter, energies, 1
