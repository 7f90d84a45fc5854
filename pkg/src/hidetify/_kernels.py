"""Low-level numeric kernels.

The expectile/correlation sweep and the lasso coordinate descent are the
two hot loops of the package; both are JIT-compiled with numba when it is
available and fall back to vectorized numpy otherwise. Both paths share
the same contracts:

``corr_block(Xt, y, taus, tol, max_iter) -> (rho, status, converged)``
    Xt is the (p, n) transposed predictor block (C-contiguous), y the
    length-n response, taus the expectile levels. rho is (q, p) with
    rho[l, j] the asymmetric correlation of column j with y at taus[l].
    status: -1 ok, -2 constant response, j >= 0 first constant column.

``lasso_cd(Xt, y, lam, tol, max_sweeps) -> (beta, sweeps, converged)``
    Cyclic coordinate descent for (1/(2n))||y - Xb||^2 + lam*||b||_1
    where the columns of X (rows of Xt) have zero mean and unit
    1/n-variance and y is centered. Zero rows of Xt are skipped.

Weight convention at a tie (value equal to the current center): the
downward weight 1 - tau applies, matching |tau - 1(t <= 0)|.
"""

import math

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - sandbox always has numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


@njit(cache=True, nogil=True)
def _expectile_irls_nb(x, tau, tol, max_iter):
    n = x.size
    s = 0.0
    for i in range(n):
        s += x[i]
    theta = s / n
    if tau == 0.5:
        return theta, True
    for _ in range(max_iter):
        num = 0.0
        den = 0.0
        for i in range(n):
            w = tau if x[i] > theta else 1.0 - tau
            num += w * x[i]
            den += w
        new = num / den
        if abs(new - theta) <= tol * (1.0 + abs(theta)):
            return new, True
        theta = new
    return theta, False


@njit(cache=True, nogil=True)
def _corr_block_nb(Xt, y, taus, tol, max_iter):
    p, n = Xt.shape
    q = taus.size
    rho = np.empty((q, p))
    ymin = y[0]
    ymax = y[0]
    for i in range(1, n):
        if y[i] < ymin:
            ymin = y[i]
        if y[i] > ymax:
            ymax = y[i]
    if ymin == ymax:
        return rho, -2, True
    for j in range(p):
        cmin = Xt[j, 0]
        cmax = Xt[j, 0]
        for i in range(1, n):
            v = Xt[j, i]
            if v < cmin:
                cmin = v
            if v > cmax:
                cmax = v
        if cmin == cmax:
            return rho, j, True
    converged = True
    for l in range(q):
        tau = taus[l]
        mu_y, ok = _expectile_irls_nb(y, tau, tol, max_iter)
        converged = converged and ok
        vy = 0.0
        for i in range(n):
            d = y[i] - mu_y
            vy += d * d
        sy = math.sqrt(vy / n)
        for j in range(p):
            mu_x, ok = _expectile_irls_nb(Xt[j], tau, tol, max_iter)
            converged = converged and ok
            vx = 0.0
            cov = 0.0
            for i in range(n):
                dx = Xt[j, i] - mu_x
                cov += dx * (y[i] - mu_y)
                vx += dx * dx
            rho[l, j] = (cov / n) / (math.sqrt(vx / n) * sy)
    return rho, -1, converged


@njit(cache=True, nogil=True)
def _lasso_cd_nb(Xt, y, lam, tol, max_sweeps):
    p, n = Xt.shape
    beta = np.zeros(p)
    r = y.copy()
    for sweep in range(1, max_sweeps + 1):
        max_delta = 0.0
        for j in range(p):
            bj = beta[j]
            g = 0.0
            active = False
            for i in range(n):
                v = Xt[j, i]
                if v != 0.0:
                    active = True
                g += v * (r[i] + v * bj)
            if not active:
                continue
            g /= n
            if g > lam:
                new = g - lam
            elif g < -lam:
                new = g + lam
            else:
                new = 0.0
            d = new - bj
            if d != 0.0:
                for i in range(n):
                    r[i] -= d * Xt[j, i]
                beta[j] = new
                ad = abs(d)
                if ad > max_delta:
                    max_delta = ad
        if max_delta <= tol:
            return beta, sweep, True
    return beta, max_sweeps, False


def _irls_columns_np(X, tau, tol, max_iter):
    """Vectorized IRLS over the columns of X; returns (theta, converged)."""
    theta = X.mean(axis=0)
    if tau == 0.5:
        return theta, True
    for _ in range(max_iter):
        w = np.where(X > theta, tau, 1.0 - tau)
        new = np.einsum("ij,ij->j", w, X) / w.sum(axis=0)
        if np.all(np.abs(new - theta) <= tol * (1.0 + np.abs(theta))):
            return new, True
        theta = new
    return theta, False


def _corr_block_np(Xt, y, taus, tol, max_iter):
    X = Xt.T
    n, p = X.shape
    q = taus.size
    rho = np.empty((q, p))
    if y.min() == y.max():
        return rho, -2, True
    bad = np.nonzero(X.min(axis=0) == X.max(axis=0))[0]
    if bad.size:
        return rho, int(bad[0]), True
    converged = True
    for l in range(q):
        tau = float(taus[l])
        mu_y, ok_y = _irls_columns_np(y[:, None], tau, tol, max_iter)
        mu_x, ok_x = _irls_columns_np(X, tau, tol, max_iter)
        converged = converged and ok_y and ok_x
        dy = y - mu_y[0]
        dx = X - mu_x
        sy = math.sqrt(float(dy @ dy) / n)
        sx = np.sqrt(np.einsum("ij,ij->j", dx, dx) / n)
        rho[l] = (dy @ dx / n) / (sx * sy)
    return rho, -1, converged


def _lasso_cd_np(Xt, y, lam, tol, max_sweeps):
    X = Xt.T
    n, p = X.shape
    beta = np.zeros(p)
    r = y.copy()
    active = np.any(X != 0.0, axis=0)
    for sweep in range(1, max_sweeps + 1):
        max_delta = 0.0
        for j in range(p):
            if not active[j]:
                continue
            xj = X[:, j]
            g = (xj @ r) / n + beta[j]
            new = math.copysign(max(abs(g) - lam, 0.0), g)
            d = new - beta[j]
            if d != 0.0:
                r -= d * xj
                beta[j] = new
                max_delta = max(max_delta, abs(d))
        if max_delta <= tol:
            return beta, sweep, True
    return beta, max_sweeps, False


if HAS_NUMBA:
    corr_block = _corr_block_nb
    lasso_cd = _lasso_cd_nb
else:  # pragma: no cover
    corr_block = _corr_block_np
    lasso_cd = _lasso_cd_np
