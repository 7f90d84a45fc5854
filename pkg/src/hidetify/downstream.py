"""Sparse regression on raw vs. cleaned data.

The lasso is solved by cyclic coordinate descent with soft-thresholding
on internally standardized columns (zero mean, unit 1/n-variance) and a
centered response, i.e. it minimizes

    (1/(2n)) * ||y - b0 - X b||^2 + lam * ||b||_1

in the standardized parametrization. Reported coefficients are mapped
back to the original scale; the stationarity (KKT) check therefore
applies to the standardized problem that was actually solved.

The coefficient error metric is sqrt(||bhat - b||_2) - the square root
of the l2 norm itself, not of its square - kept deliberately to match
the benchmark definition used throughout the simulation harness.
"""

from dataclasses import dataclass, replace as dc_replace

import numpy as np

from . import _kernels
from .errors import InvalidParams, NoConvergence
from .influence import DataMatrix, derive_seed
from .ramm import RammParams, run_detector
from .simgen import ContaminationSpec, contaminate, detection_metrics, generate_clean

LASSO_TOL = 1e-8
LASSO_MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class LassoFit:
    coefficients: np.ndarray  # original-scale slopes, length p
    intercept: float
    lam: float
    iterations: int


@dataclass(frozen=True)
class CoefficientMetrics:
    err: float
    tpr: float
    fpr: float


@dataclass(frozen=True)
class BenchmarkRecord:
    method: str
    model: str
    mu: float
    replication: int
    metric: str
    value: float


def _standardize(data: DataMatrix):
    X = data.values
    n = data.n
    means = X.mean(axis=0)
    sds = np.sqrt(np.mean((X - means) ** 2, axis=0))
    safe = np.where(sds > 0.0, sds, 1.0)  # constant columns become all-zero
    Xs = (X - means) / safe
    y_mean = float(data.response.mean())
    yc = data.response - y_mean
    return Xs, yc, means, safe, y_mean


def fit_lasso(data: DataMatrix, lam, max_sweeps=LASSO_MAX_SWEEPS, tol=LASSO_TOL) -> LassoFit:
    """Coordinate-descent lasso fit at a fixed penalty level."""
    lam = float(lam)
    if lam < 0:
        raise InvalidParams("lambda must be >= 0")
    Xs, yc, means, sds, y_mean = _standardize(data)
    beta_std, sweeps, converged = _kernels.lasso_cd(
        np.ascontiguousarray(Xs.T), yc, lam, tol, max_sweeps
    )
    if not converged:
        raise NoConvergence(f"coordinate descent did not converge in {max_sweeps} sweeps")
    coefficients = beta_std / sds
    intercept = y_mean - float(coefficients @ means)
    return LassoFit(coefficients=coefficients, intercept=intercept, lam=lam, iterations=int(sweeps))


def kkt_violation(fit: LassoFit, data: DataMatrix) -> float:
    """Max stationarity violation of the fit on the standardized problem."""
    Xs, yc, _, sds, _ = _standardize(data)
    beta_std = fit.coefficients * sds
    r = yc - Xs @ beta_std
    g = Xs.T @ r / data.n
    zero = beta_std == 0.0
    viol_zero = np.maximum(np.abs(g[zero]) - fit.lam, 0.0)
    viol_active = np.abs(g[~zero] - fit.lam * np.sign(beta_std[~zero]))
    worst = 0.0
    if viol_zero.size:
        worst = max(worst, float(viol_zero.max()))
    if viol_active.size:
        worst = max(worst, float(viol_active.max()))
    return worst


def lambda_max(data: DataMatrix) -> float:
    """Smallest penalty at which every slope is exactly zero."""
    Xs, yc, _, _, _ = _standardize(data)
    return float(np.max(np.abs(Xs.T @ yc)) / data.n)


def default_lambda_grid(data: DataMatrix, size=20, ratio=1e-2) -> np.ndarray:
    lmax = lambda_max(data)
    if lmax <= 0.0:
        return np.array([0.0])
    return np.geomspace(lmax, lmax * ratio, num=size)


def cv_mse(data: DataMatrix, folds, grid, seed, max_sweeps=LASSO_MAX_SWEEPS):
    """Held-out MSE per (lambda, fold); rows are shuffled once by the seed.

    Returns (grid, fold_mse) with fold_mse of shape (len(grid), folds).
    """
    if folds < 2:
        raise InvalidParams("need at least 2 folds")
    grid = [float(l) for l in grid]
    if not grid:
        raise InvalidParams("empty lambda grid")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    perm = rng.permutation(data.n)
    fold_rows = [np.sort(perm[f::folds]) for f in range(folds)]
    fold_mse = np.empty((len(grid), folds))
    for i, lam in enumerate(grid):
        for f in range(folds):
            test = fold_rows[f]
            train = np.sort(np.concatenate([fold_rows[g] for g in range(folds) if g != f]))
            fit = fit_lasso(data.take_rows(train), lam, max_sweeps=max_sweeps)
            pred = fit.intercept + data.values[test] @ fit.coefficients
            fold_mse[i, f] = np.mean((data.response[test] - pred) ** 2)
    return grid, fold_mse


def select_lambda_cv(data: DataMatrix, folds, grid, seed, max_sweeps=LASSO_MAX_SWEEPS) -> float:
    """Penalty level minimizing mean held-out MSE; ties go to the larger value."""
    grid, fold_mse = cv_mse(data, folds, grid, seed, max_sweeps=max_sweeps)
    mean_mse = fold_mse.mean(axis=1)
    best = mean_mse.min()
    return max(lam for lam, mse in zip(grid, mean_mse) if mse == best)


def coefficient_metrics(fit, true_beta) -> CoefficientMetrics:
    """Bias and support-recovery metrics of a fit against the true slopes."""
    bhat = np.asarray(fit.coefficients if isinstance(fit, LassoFit) else fit, dtype=float)
    beta = np.asarray(true_beta, dtype=float)
    if bhat.shape != beta.shape:
        raise InvalidParams(f"coefficient length {bhat.size} vs true length {beta.size}")
    err = float(np.sqrt(np.linalg.norm(bhat - beta)))
    supp = beta != 0.0
    supp_hat = bhat != 0.0
    if not supp.any():
        raise InvalidParams("true coefficient vector has empty support")
    tpr = float(np.sum(supp & supp_hat) / np.sum(supp))
    n_null = int(np.sum(~supp))
    fpr = float(np.sum(~supp & supp_hat) / n_null) if n_null else 0.0
    return CoefficientMetrics(err=err, tpr=tpr, fpr=fpr)


@dataclass
class PipelineComparison:
    records: list  # BenchmarkRecord, long format
    replications: int

    def summarize(self):
        """Mean and quartiles per (method, metric), with replication count."""
        by_key = {}
        for rec in self.records:
            by_key.setdefault((rec.method, rec.metric), []).append(rec.value)
        rows = []
        for (method, metric), values in sorted(by_key.items()):
            v = np.asarray(values)
            rows.append(
                {
                    "method": method,
                    "metric": metric,
                    "mean": float(v.mean()),
                    "q25": float(np.quantile(v, 0.25)),
                    "median": float(np.quantile(v, 0.5)),
                    "q75": float(np.quantile(v, 0.75)),
                    "count": int(v.size),
                }
            )
        return rows

    def mean(self, method, metric) -> float:
        values = [r.value for r in self.records if r.method == method and r.metric == metric]
        if not values:
            raise InvalidParams(f"no records for ({method}, {metric})")
        return float(np.mean(values))


def compare_pipelines(
    spec: ContaminationSpec,
    methods,
    replications,
    seed,
    *,
    n=100,
    p=300,
    params: RammParams | None = None,
    folds=5,
    grid_size=20,
    grid_ratio=1e-2,
    max_sweeps=20 * LASSO_MAX_SWEEPS,  # p > n folds at tiny penalties converge slowly
    threads=1,
) -> PipelineComparison:
    """Generate, contaminate, optionally clean, fit, and score, per method.

    "RawData" skips detection and fits on the contaminated sample as is;
    every other method name is a detector identifier whose flagged rows
    are dropped before the cross-validated lasso fit.
    """
    if replications < 1:
        raise InvalidParams("need at least one replication")
    methods = list(methods)
    params = params or RammParams()
    records = []
    for rep in range(replications):
        clean = generate_clean(n, p, derive_seed(seed, rep, 0))
        sample = contaminate(clean, dc_replace(spec, seed=derive_seed(seed, rep, 1)))
        for mi, method in enumerate(methods):
            if method == "RawData":
                flagged = ()
            else:
                det_params = dc_replace(params, seed=derive_seed(seed, rep, 2 + mi))
                flagged = run_detector(method, sample.data, det_params, threads=threads).influential
            kept = sorted(set(range(n)) - set(flagged))
            cleaned = sample.data.take_rows(kept)
            grid = default_lambda_grid(cleaned, size=grid_size, ratio=grid_ratio)
            lam = select_lambda_cv(
                cleaned, folds, grid, derive_seed(seed, rep, 1000 + mi), max_sweeps=max_sweeps
            )
            fit = fit_lasso(cleaned, lam, max_sweeps=max_sweeps)
            coef = coefficient_metrics(fit, sample.beta)
            values = {
                "err": coef.err,
                "coef_tpr": coef.tpr,
                "coef_fpr": coef.fpr,
                "lambda": lam,
                "kkt_violation": kkt_violation(fit, cleaned),
            }
            if method != "RawData" and sample.truth:
                det = detection_metrics(sample.truth, flagged, n)
                values["tpr_inf"] = det.tpr_inf
                values["fpr_inf"] = det.fpr_inf
            for metric, value in values.items():
                records.append(
                    BenchmarkRecord(
                        method=method,
                        model=spec.model,
                        mu=spec.mu,
                        replication=rep,
                        metric=metric,
                        value=value,
                    )
                )
    return PipelineComparison(records=records, replications=replications)
