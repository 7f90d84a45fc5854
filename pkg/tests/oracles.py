"""Independent brute-force reference implementations used by the tests.

Everything here is deliberately written from the definitions, without
touching the package's solvers: expectiles come from 1-D minimization
or exact segment enumeration, correlations and influence statistics
from direct re-evaluation of their formulas. Slow and simple on
purpose.
"""

import numpy as np
from scipy.optimize import minimize_scalar


def asym_loss(values, tau, theta):
    values = np.asarray(values, dtype=float)
    w = np.where(values - theta > 0, tau, 1.0 - tau)
    return float(np.mean(w * (values - theta) ** 2))


def expectile_minimize(values, tau):
    """Expectile via bounded 1-D minimization of the empirical loss."""
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return lo
    res = minimize_scalar(
        lambda t: asym_loss(values, tau, t),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.x)


def expectile_exact(values, tau):
    """Exact expectile by enumerating the sorted-sample segments.

    On each segment between consecutive order statistics the weights are
    constant, so the stationarity condition is linear in theta; return
    the unique root that lands inside its own segment.
    """
    ys = np.sort(np.asarray(values, dtype=float))
    n = ys.size
    if ys[0] == ys[-1]:
        return float(ys[0])
    for s in range(1, n + 1):
        lo, hi = ys[:s], ys[s:]
        num = tau * hi.sum() + (1.0 - tau) * lo.sum()
        den = tau * hi.size + (1.0 - tau) * lo.size
        theta = num / den
        if theta < ys[s - 1] - 1e-12:
            continue
        if s < n and theta > ys[s] + 1e-12:
            continue
        return float(theta)
    raise AssertionError("no segment contained its stationary point")


def asym_sd(values, tau):
    mu = expectile_exact(values, tau)
    d = np.asarray(values, dtype=float) - mu
    return float(np.sqrt(np.mean(d * d)))


def asym_corr(x, y, tau):
    """Asymmetric correlation straight from the definition."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mx = expectile_exact(x, tau)
    my = expectile_exact(y, tau)
    cov = float(np.mean((x - mx) * (y - my)))
    return cov / (asym_sd(x, tau) * asym_sd(y, tau))


def corr_vector(X, y, tau, rows=None):
    if rows is not None:
        X = X[np.asarray(rows)]
        y = y[np.asarray(rows)]
    return np.array([asym_corr(X[:, j], y, tau) for j in range(X.shape[1])])


def loo_d(X, y, k, tau):
    """Mean squared correlation change from removing row k (single tau)."""
    n = X.shape[0]
    keep = [i for i in range(n) if i != k]
    full = corr_vector(X, y, tau)
    loo = corr_vector(X, y, tau, rows=keep)
    return float(np.mean((full - loo) ** 2))


def asym_him(X, y, k, taus):
    return float(sum(loo_d(X, y, k, tau) for tau in taus))


def subset_d(X, y, k, subset, tau):
    """Mean squared correlation change from adding row k to a subset."""
    subset = sorted(int(i) for i in subset)
    augmented = sorted(subset + [int(k)])
    minus = corr_vector(X, y, tau, rows=subset)
    plus = corr_vector(X, y, tau, rows=augmented)
    return float(np.mean((plus - minus) ** 2))


def t_min_max(X, y, k, subsets, taus):
    """Exhaustive (r, l) enumeration of the min and max statistics."""
    n_sub = len(subsets[0]) + 1
    d = np.array([[subset_d(X, y, k, sub, tau) for tau in taus] for sub in subsets])
    t_min = n_sub**2 * d.min()
    t_max = n_sub**2 * d.sum(axis=1).max()
    return float(t_min), float(t_max)


def pearson_1n(x, y):
    """Pearson correlation with explicit 1/n moments."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    return float(np.mean(dx * dy) / (np.sqrt(np.mean(dx * dx)) * np.sqrt(np.mean(dy * dy))))


def ols_fit(X, y):
    """Least squares slopes and intercept via the normal equations."""
    n = X.shape[0]
    A = np.column_stack([np.ones(n), X])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef[0], coef[1:]


def lasso_objective(X, y, intercept, beta, lam):
    n = X.shape[0]
    r = y - intercept - X @ beta
    return float(r @ r / (2 * n) + lam * np.abs(beta).sum())
