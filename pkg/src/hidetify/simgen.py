"""Synthetic data generators and detection-quality metrics.

Clean samples: rows are multivariate normal with AR(1) predictor
correlation 0.5^|j - j'| (generated by the order-1 recursion, which is
the Cholesky factor of that covariance), response = X beta + N(0, 1)
noise with the fixed sparse beta (10 leading nonzero slopes, zero
intercept).

Contamination replaces the first floor(fraction * n) rows:

* masking ("I"): the replaced rows cluster around the observation with
  the largest |y|; each gets 10 randomly chosen predictor coordinates
  bumped by i/p and a response offset of mu plus small noise.
* swamping ("II"): the replaced rows come from an independent normal
  predictor law whose last 10% of coordinates are mean-shifted by
  0.5 * mu, with a perturbed coefficient vector on the last 20
  coordinates and a random overall sign flip on the response.
* mixed ("III"): first half masking, second half swamping.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptyTruth, InvalidParams, ModelIIRequiresP20
from .influence import DataMatrix

MODELS = ("I", "II", "III")

# 10 leading slopes; everything past position 10 is zero
BETA_HEAD = (0.3, 0.1, 0.2, 0.3, 0.9, 0.3, 1.1, 2.2, 0.0, 0.4)
AR_RHO = 0.5


@dataclass(frozen=True)
class ContaminationSpec:
    model: str  # I (masking) | II (swamping) | III (mixed)
    mu: float
    fraction: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidParams(f"unknown contamination model {self.model!r}")
        if not (0.0 <= self.fraction < 0.5):
            raise InvalidParams("fraction must be in [0, 0.5)")
        if self.mu <= 0:
            raise InvalidParams("mu must be positive")


@dataclass
class ContaminatedSample:
    data: DataMatrix
    truth: tuple  # 0-based indices of the replaced rows
    beta: np.ndarray  # true slope vector, length p
    intercept: float = 0.0


@dataclass(frozen=True)
class DetectionMetrics:
    tpr_inf: float
    fpr_inf: float


def true_beta(p) -> np.ndarray:
    if p < len(BETA_HEAD):
        raise InvalidParams(f"need p >= {len(BETA_HEAD)}")
    beta = np.zeros(p)
    beta[: len(BETA_HEAD)] = BETA_HEAD
    return beta


def ar1_predictors(n, p, rng) -> np.ndarray:
    """Rows iid N(0, Sigma) with Sigma[j, j'] = AR_RHO^|j - j'|."""
    z = rng.standard_normal((n, p))
    X = np.empty((n, p))
    X[:, 0] = z[:, 0]
    scale = np.sqrt(1.0 - AR_RHO**2)
    for j in range(1, p):
        X[:, j] = AR_RHO * X[:, j - 1] + scale * z[:, j]
    return X


def generate_clean(n, p, seed) -> ContaminatedSample:
    """Uncontaminated regression sample; truth set is empty."""
    if n < 4:
        raise InvalidParams("need n >= 4")
    beta = true_beta(p)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    X = ar1_predictors(n, p, rng)
    y = X @ beta + rng.standard_normal(n)
    return ContaminatedSample(data=DataMatrix(X, y), truth=(), beta=beta)


def _apply_masking(X, y, rows, mu, p, rng):
    # rows cluster near the most extreme response of the clean sample
    i0 = int(np.argmax(np.abs(y)))
    x_seed = X[i0].copy()
    y_seed = float(y[i0])
    for row in rows:
        i = row + 1  # 1-based position in the contamination formulas
        coords = rng.choice(p, size=10, replace=False)
        noise = rng.normal(0.0, np.sqrt(0.5))
        X[row] = x_seed
        X[row, coords] += i / p
        y[row] = y_seed + mu + noise * (i / p)


def swamping_coefficients(beta, mu) -> np.ndarray:
    """Coefficient vector of the swamping scheme: last 20 slopes bumped by j * 0.005 * mu."""
    beta = np.asarray(beta, dtype=float)
    if beta.size < 20:
        raise ModelIIRequiresP20(f"swamping perturbs the last 20 coefficients; p={beta.size}")
    beta_tilde = beta.copy()
    beta_tilde[-20:] += np.arange(1, 21) * 0.005 * mu
    return beta_tilde


def swamping_predictor_means(p, mu) -> np.ndarray:
    """Mean vector of the swamping predictors: last p - floor(0.9 p) coordinates at 0.5 * mu."""
    gamma = np.zeros(p)
    gamma[int(np.floor(0.9 * p)) :] = 0.5 * mu
    return gamma


def _apply_swamping(X, y, rows, mu, p, beta, rng):
    beta_tilde = swamping_coefficients(beta, mu)
    gamma = swamping_predictor_means(p, mu)
    x_new = rng.standard_normal((len(rows), p)) + gamma
    eps = rng.standard_normal(len(rows))
    signs = 2 * rng.integers(0, 2, size=len(rows)) - 1
    X[rows] = x_new
    y[rows] = signs * (x_new @ beta_tilde + eps)


def contaminate(clean: ContaminatedSample, spec: ContaminationSpec) -> ContaminatedSample:
    """Replace the first floor(fraction * n) rows per the chosen scheme."""
    if clean.truth:
        raise InvalidParams("input sample is already contaminated")
    n = clean.data.n
    p = clean.data.p
    n_inf = int(np.floor(spec.fraction * n))
    X = clean.data.values.copy()
    y = clean.data.response.copy()
    if n_inf == 0:
        return replace(clean, data=DataMatrix(X, y))
    rows = list(range(n_inf))
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    if spec.model == "I":
        _apply_masking(X, y, rows, spec.mu, p, rng)
    elif spec.model == "II":
        _apply_swamping(X, y, rows, spec.mu, p, clean.beta, rng)
    else:  # III: first half masking, second half swamping
        half = n_inf // 2
        _apply_masking(X, y, rows[:half], spec.mu, p, rng)
        _apply_swamping(X, y, rows[half:], spec.mu, p, clean.beta, rng)
    return replace(clean, data=DataMatrix(X, y), truth=tuple(rows))


def detection_metrics(truth, flagged, n) -> DetectionMetrics:
    """True/false positive rates of a flagged set against the truth set."""
    truth = set(int(i) for i in truth)
    flagged = set(int(i) for i in flagged)
    for idx in truth | flagged:
        if not (0 <= idx < n):
            raise InvalidParams(f"index {idx} outside 0..{n - 1}")
    if not truth:
        raise EmptyTruth("true-positive rate undefined with no true influentials")
    tpr = len(truth & flagged) / len(truth)
    fpr = len(flagged - truth) / (n - len(truth))
    return DetectionMetrics(tpr_inf=tpr, fpr_inf=fpr)
