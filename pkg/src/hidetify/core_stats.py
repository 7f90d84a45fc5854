"""Expectile estimation and asymmetric second-moment statistics.

An expectile of level tau in (0, 1) is the minimizer of the asymmetric
square loss ``mean(|tau - 1(y - theta <= 0)| * (y - theta)^2)``. It is
computed by iteratively reweighted least squares (IRLS): starting from
the arithmetic mean, repeat ``theta <- sum(w*y)/sum(w)`` with
``w = tau`` above the current center and ``1 - tau`` at or below it.
With the mean start the iterates move monotonically toward the
minimizer, so the loss never increases and convergence is fast.

Asymmetric variance, covariance, and correlation are the usual second
moments with deviations taken from the tau-expectile instead of the
mean, normalized by 1/n. At tau = 0.5 everything reduces to the
ordinary mean / Pearson quantities.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateColumn, InvalidLevel, InvalidSample, NoConvergence

IRLS_TOL = 1e-10
IRLS_MAX_ITER = 200


@dataclass(frozen=True)
class ExpectileSequence:
    """Strictly increasing asymmetry levels, each in (0, 1)."""

    levels: tuple

    def __post_init__(self):
        levels = tuple(float(t) for t in self.levels)
        if len(levels) < 1:
            raise InvalidLevel("need at least one expectile level")
        for t in levels:
            if not (0.0 < t < 1.0):
                raise InvalidLevel(f"expectile level {t} outside (0, 1)")
        if any(a >= b for a, b in zip(levels, levels[1:])):
            raise InvalidLevel("expectile levels must be strictly increasing")
        object.__setattr__(self, "levels", levels)

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)


DEFAULT_TAUS = ExpectileSequence((0.25, 0.5, 0.75))


def as_expectiles(taus) -> ExpectileSequence:
    if isinstance(taus, ExpectileSequence):
        return taus
    if isinstance(taus, (int, float)):
        return ExpectileSequence((taus,))
    return ExpectileSequence(tuple(taus))


def _check_sample(values, min_len=1) -> np.ndarray:
    y = np.asarray(values, dtype=float)
    if y.ndim != 1:
        raise InvalidSample(f"expected a 1-D sample, got shape {y.shape}")
    if y.size < min_len:
        raise InvalidSample(f"sample needs at least {min_len} entries, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise InvalidSample("sample contains non-finite entries")
    return y


def _check_level(tau) -> float:
    tau = float(tau)
    if not (0.0 < tau < 1.0):
        raise InvalidLevel(f"expectile level {tau} outside (0, 1)")
    return tau


def asymmetric_loss(values, tau, theta) -> float:
    """Empirical asymmetric square loss at center theta."""
    y = np.asarray(values, dtype=float)
    w = np.where(y > theta, tau, 1.0 - tau)
    return float(np.mean(w * (y - theta) ** 2))


def empirical_expectile(values, tau) -> float:
    """Expectile of a sample by IRLS from the mean start.

    Satisfies the weighted fixed point theta = sum(w*y)/sum(w) with
    w_i = tau for y_i > theta and 1 - tau otherwise, to within
    |delta| <= 1e-10 * (1 + |theta|).
    """
    y = _check_sample(values, min_len=1)
    tau = _check_level(tau)
    if y.min() == y.max():
        return float(y[0])
    theta = float(np.mean(y))
    if tau == 0.5:
        return theta
    loss = asymmetric_loss(y, tau, theta)
    for _ in range(IRLS_MAX_ITER):
        w = np.where(y > theta, tau, 1.0 - tau)
        new = float(np.dot(w, y) / np.sum(w))
        if __debug__:
            new_loss = asymmetric_loss(y, tau, new)
            assert new_loss <= loss * (1.0 + 1e-12) + 1e-300, "IRLS loss increased"
            loss = new_loss
        if abs(new - theta) <= IRLS_TOL * (1.0 + abs(theta)):
            return new
        theta = new
    raise NoConvergence(f"IRLS did not converge in {IRLS_MAX_ITER} iterations")


def asymmetric_variance(values, tau) -> float:
    """Mean squared deviation from the tau-expectile (1/n normalization)."""
    y = _check_sample(values, min_len=2)
    mu = empirical_expectile(y, tau)
    return float(np.mean((y - mu) ** 2))


def asymmetric_covariance(x, y, tau) -> float:
    x = _check_sample(x, min_len=2)
    y = _check_sample(y, min_len=2)
    if x.size != y.size:
        raise InvalidSample(f"length mismatch: {x.size} vs {y.size}")
    mx = empirical_expectile(x, tau)
    my = empirical_expectile(y, tau)
    return float(np.mean((x - mx) * (y - my)))


def asymmetric_correlation(x, y, tau) -> float:
    """Asymmetric covariance normalized by asymmetric standard deviations.

    Raises DegenerateColumn when either input is constant (column index 0
    for x, -1 for the response y).
    """
    x = _check_sample(x, min_len=2)
    y = _check_sample(y, min_len=2)
    if x.size != y.size:
        raise InvalidSample(f"length mismatch: {x.size} vs {y.size}")
    tau = _check_level(tau)
    if x.min() == x.max():
        raise DegenerateColumn(0)
    if y.min() == y.max():
        raise DegenerateColumn(-1)
    mx = empirical_expectile(x, tau)
    my = empirical_expectile(y, tau)
    dx = x - mx
    dy = y - my
    n = x.size
    sx = np.sqrt(np.dot(dx, dx) / n)
    sy = np.sqrt(np.dot(dy, dy) / n)
    if sx == 0.0:  # deviations can underflow even when min < max
        raise DegenerateColumn(0)
    if sy == 0.0:
        raise DegenerateColumn(-1)
    return float((np.dot(dx, dy) / n) / (sx * sy))


def columnwise_asymmetric_correlations(X, y, taus) -> np.ndarray:
    """Asymmetric correlation of every column of X with y at every tau.

    Returns a (q, p) array with entry (l, j) the correlation of column j
    with y at level taus[l].
    """
    X = np.asarray(X, dtype=float)
    y = _check_sample(y, min_len=2)
    if X.ndim != 2:
        raise InvalidSample(f"expected a 2-D matrix, got shape {X.shape}")
    if X.shape[0] != y.size:
        raise InvalidSample(f"row count {X.shape[0]} does not match response length {y.size}")
    if not np.all(np.isfinite(X)):
        raise InvalidSample("matrix contains non-finite entries")
    levels = np.asarray(as_expectiles(taus).levels, dtype=float)
    Xt = np.ascontiguousarray(X.T)
    rho, status, converged = _kernels.corr_block(Xt, y, levels, IRLS_TOL, IRLS_MAX_ITER)
    if status != -1:
        raise DegenerateColumn(int(status) if status >= 0 else -1)
    if not converged:
        raise NoConvergence("columnwise expectile sweep did not converge")
    return rho


def corr_block_on_rows(values, response, rows, levels) -> np.ndarray:
    """Correlation sweep restricted to the given row indices.

    Internal fast path used by the influence statistics: no input
    re-validation, levels must already be a float array.
    """
    Xt = np.ascontiguousarray(values[rows].T)
    y = response[rows]
    rho, status, converged = _kernels.corr_block(Xt, y, levels, IRLS_TOL, IRLS_MAX_ITER)
    if status != -1:
        raise DegenerateColumn(int(status) if status >= 0 else -1)
    if not converged:
        raise NoConvergence("columnwise expectile sweep did not converge")
    return rho
