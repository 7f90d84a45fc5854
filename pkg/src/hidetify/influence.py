"""Leave-one-out and subset-based influence statistics.

For observation k, the single-detection statistic is the mean squared
change of the columnwise asymmetric correlations when row k is removed,
summed over the expectile levels. The subset statistics compare the
correlations on a random subset A_r (drawn from the remaining rows)
against the correlations on A_r with row k added back:

    d[r, l] = mean_j (rho_{tau_l, A_r + k, j} - rho_{tau_l, A_r, j})^2

The min statistic is ``n_sub^2 * min_{r,l} d[r, l]`` (null: chi-square
with 1 df); the max statistic is ``n_sub^2 * max_r sum_l d[r, l]``
(null: chi-square with q df). n_sub is the augmented subset size.
All superscript-(k) quantities are recomputed from scratch on the
indicated rows, never adjusted incrementally.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .core_stats import as_expectiles, corr_block_on_rows
from .errors import DegenerateColumn, InvalidParams, InvalidSample

# step codes keying the per-observation subset draws
STEP_STANDALONE = 0
STEP_MIN = 1
STEP_MAX = 2


@dataclass
class DataMatrix:
    """An n x p predictor matrix paired with a length-n response."""

    values: np.ndarray
    response: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=float)
        self.response = np.ascontiguousarray(self.response, dtype=float)
        if self.values.ndim != 2:
            raise InvalidSample(f"predictor matrix must be 2-D, got shape {self.values.shape}")
        if self.response.ndim != 1 or self.response.size != self.values.shape[0]:
            raise InvalidSample("response length does not match predictor rows")
        if self.values.shape[0] < 4:
            raise InvalidSample("need at least 4 observations")
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.response))):
            raise InvalidSample("data contains non-finite entries")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def take_rows(self, rows) -> "DataMatrix":
        rows = np.asarray(rows, dtype=np.intp)
        return DataMatrix(self.values[rows], self.response[rows])


@dataclass(frozen=True)
class InfluenceScore:
    observation: int
    statistic: float
    p_value: float
    kind: str  # single_asymHIM | subset_min | subset_max


@dataclass(frozen=True)
class SubsetFamily:
    """m index subsets of size n_k drawn from the candidate pool minus the target.

    Regenerating with the same (seed, target, m, n_k, candidates) gives
    the identical family. Subsets may repeat across r; indices within a
    subset are distinct.
    """

    target: int
    subsets: np.ndarray  # (m, n_k) int array
    augmented_size: int
    seed: int

    @classmethod
    def draw(cls, target, m, n_k, seed, *, n=None, candidates=None) -> "SubsetFamily":
        if (n is None) == (candidates is None):
            raise InvalidParams("pass exactly one of n or candidates")
        if candidates is None:
            candidates = np.arange(n, dtype=np.intp)
        else:
            candidates = np.asarray(sorted(candidates), dtype=np.intp)
        pool = candidates[candidates != target]
        if m < 1:
            raise InvalidParams("need m >= 1 subsets")
        if not (1 <= n_k <= pool.size):
            raise InvalidParams(f"subset size {n_k} not drawable from pool of {pool.size}")
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        subsets = np.empty((m, n_k), dtype=np.intp)
        for r in range(m):
            subsets[r] = rng.choice(pool, size=n_k, replace=False)
        return cls(target=int(target), subsets=subsets, augmented_size=n_k + 1, seed=int(seed))


def derive_seed(seed, *keys) -> int:
    """Stable integer seed keyed by (seed, *keys) via numpy's SeedSequence."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def chi2_tail(stat, df) -> float:
    """Upper-tail chi-square probability (regularized incomplete gamma)."""
    return float(chi2.sf(stat, df))


def _check_index(data: DataMatrix, k) -> int:
    k = int(k)
    if not (0 <= k < data.n):
        raise InvalidParams(f"observation index {k} outside 0..{data.n - 1}")
    return k


def loo_influence(data: DataMatrix, k, tau) -> float:
    """Mean squared correlation change from deleting row k, at one tau."""
    k = _check_index(data, k)
    levels = np.asarray(as_expectiles(tau).levels)
    all_rows = np.arange(data.n, dtype=np.intp)
    rho_full = corr_block_on_rows(data.values, data.response, all_rows, levels)
    rho_loo = corr_block_on_rows(data.values, data.response, np.delete(all_rows, k), levels)
    return float(np.mean((rho_full[0] - rho_loo[0]) ** 2))


def asym_him(data: DataMatrix, k, taus) -> float:
    """Sum of loo_influence over the expectile sequence."""
    k = _check_index(data, k)
    levels = np.asarray(as_expectiles(taus).levels)
    all_rows = np.arange(data.n, dtype=np.intp)
    rho_full = corr_block_on_rows(data.values, data.response, all_rows, levels)
    rho_loo = corr_block_on_rows(data.values, data.response, np.delete(all_rows, k), levels)
    return float(np.sum(np.mean((rho_full - rho_loo) ** 2, axis=1)))


def _family_d_tensor(data: DataMatrix, family: SubsetFamily, levels) -> np.ndarray:
    """(m, q) array of mean squared correlation changes per subset and level."""
    m = family.subsets.shape[0]
    q = levels.size
    d = np.empty((m, q))
    target = np.array([family.target], dtype=np.intp)
    for r in range(m):
        rows = family.subsets[r]
        rows_plus = np.sort(np.concatenate([rows, target]))
        try:
            rho_minus = corr_block_on_rows(data.values, data.response, rows, levels)
            rho_plus = corr_block_on_rows(data.values, data.response, rows_plus, levels)
        except DegenerateColumn as err:
            raise DegenerateColumn(err.column, subset=r) from None
        d[r] = np.mean((rho_plus - rho_minus) ** 2, axis=1)
    return d


def subset_influence(data: DataMatrix, family: SubsetFamily, tau) -> np.ndarray:
    """Per-subset influence of the family target at a single tau."""
    levels = np.asarray(as_expectiles(tau).levels)
    return _family_d_tensor(data, family, levels)[:, 0]


def asym_t_min(data: DataMatrix, family: SubsetFamily, taus) -> InfluenceScore:
    levels = np.asarray(as_expectiles(taus).levels)
    d = _family_d_tensor(data, family, levels)
    stat = float(family.augmented_size**2 * d.min())
    return InfluenceScore(family.target, stat, chi2_tail(stat, 1), "subset_min")


def asym_t_max(data: DataMatrix, family: SubsetFamily, taus) -> InfluenceScore:
    levels = np.asarray(as_expectiles(taus).levels)
    d = _family_d_tensor(data, family, levels)
    stat = float(family.augmented_size**2 * d.sum(axis=1).max())
    return InfluenceScore(family.target, stat, chi2_tail(stat, len(levels)), "subset_max")


def min_max_scores(
    data: DataMatrix,
    ks,
    m,
    n_k,
    taus,
    seed,
    step=STEP_STANDALONE,
    iteration=0,
    candidates=None,
    threads=1,
):
    """Both subset statistics for every observation in ks.

    A fresh family is drawn per observation, seeded by
    (seed, step, iteration, k) so runs are reproducible and order
    independent. Returns four arrays aligned with ks: min statistics,
    min p-values, max statistics, max p-values.
    """
    ks = [int(k) for k in ks]
    levels = np.asarray(as_expectiles(taus).levels)
    q = levels.size
    if candidates is None:
        candidates = np.arange(data.n, dtype=np.intp)
    tmin = np.empty(len(ks))
    tmax = np.empty(len(ks))

    def score_one(idx):
        k = ks[idx]
        fam = SubsetFamily.draw(
            k, m, n_k, derive_seed(seed, step, iteration, k), candidates=candidates
        )
        d = _family_d_tensor(data, fam, levels)
        tmin[idx] = fam.augmented_size**2 * d.min()
        tmax[idx] = fam.augmented_size**2 * d.sum(axis=1).max()

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(score_one, range(len(ks))))
    else:
        for idx in range(len(ks)):
            score_one(idx)
    return tmin, chi2.sf(tmin, 1), tmax, chi2.sf(tmax, q)


def single_scores(data: DataMatrix, taus, threads=1):
    """Full-sample leave-one-out statistic n^2 * asymD_k for every row.

    Returns (statistics, p_values) with the chi-square(q) upper tail.
    """
    levels = np.asarray(as_expectiles(taus).levels)
    all_rows = np.arange(data.n, dtype=np.intp)
    rho_full = corr_block_on_rows(data.values, data.response, all_rows, levels)
    stats = np.empty(data.n)

    def score_one(k):
        rho_loo = corr_block_on_rows(data.values, data.response, np.delete(all_rows, k), levels)
        stats[k] = data.n**2 * np.sum(np.mean((rho_full - rho_loo) ** 2, axis=1))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(score_one, range(data.n)))
    else:
        for k in range(data.n):
            score_one(k)
    return stats, chi2.sf(stats, levels.size)
