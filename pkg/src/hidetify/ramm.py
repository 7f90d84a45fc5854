"""Three-step min/max multiple-deletion detection.

Each outer iteration first runs the conservative Min step (flag
observations whose smallest subset statistic is extreme; protects the
good points near influential ones from being swamped) and then the
aggressive Max step (flag observations whose largest summed subset
statistic is extreme; digs out clustered influentials that mask each
other). Flagged observations leave the active set immediately, so later
iterations draw their subsets from a progressively cleaner pool. The
loop stops when an iteration flags nothing new, when the active set
would shrink to half the sample (over-removal safety), or at the
iteration cap. A final Validation step retests every flagged candidate
one at a time against the surviving active set; only confirmed
candidates are reported as influential, so over-flagging in the first
two steps is recoverable.

Thresholds: the Min step flags p < alpha_min (nominal, not Bonferroni;
the floor(omega * n) cap on the smallest p-values is the real guard
against over-removal, and validation filters false flags afterwards -
set bonferroni_min for the strict alpha_min / n_k variant, which has
essentially no recall against swamping). The Max step flags
p < alpha_max / |active| at the nominal family-wise level. Validation
confirms p < alpha_valid / |candidates| using |clean + 1|^2 * asymD_k
against chi-square(q).
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .core_stats import as_expectiles, corr_block_on_rows
from .errors import InvalidParams, TooFewActive
from .influence import (
    STEP_MAX,
    STEP_MIN,
    DataMatrix,
    chi2_tail,
    min_max_scores,
    single_scores,
)

DETECTORS = ("asymMIP", "asymHIM", "HIM", "MIP")


@dataclass(frozen=True)
class RammParams:
    m: int = 5
    n_k: int | None = None  # None -> floor(n / 2)
    omega: float = 0.2
    alpha_min: float = 0.05
    alpha_max: float = 0.001
    alpha_valid: float = 0.05
    taus: tuple = (0.25, 0.5, 0.75)
    max_outer_iters: int = 10
    seed: int = 0
    bonferroni_min: bool = False  # True: gate the Min step at alpha_min / n_k

    def __post_init__(self):
        object.__setattr__(self, "taus", tuple(as_expectiles(self.taus).levels))
        if self.m < 1:
            raise InvalidParams("m must be >= 1")
        if not (0.0 < self.omega < 1.0):
            raise InvalidParams("omega must be in (0, 1)")
        for name in ("alpha_min", "alpha_max", "alpha_valid"):
            a = getattr(self, name)
            if not (0.0 < a < 1.0):
                raise InvalidParams(f"{name} must be in (0, 1)")
        if self.max_outer_iters < 1:
            raise InvalidParams("max_outer_iters must be >= 1")

    def resolve_n_k(self, n) -> int:
        n_k = n // 2 if self.n_k is None else int(self.n_k)
        if not (1 <= n_k <= n - 2):
            raise InvalidParams(f"n_k={n_k} outside 1..{n - 2}")
        return n_k


@dataclass(frozen=True)
class TraceEntry:
    step: str  # min | max | validation
    iteration: int
    tested: tuple
    statistics: np.ndarray
    p_values: np.ndarray
    flagged: tuple


@dataclass
class DetectionResult:
    influential: tuple
    clean: tuple
    trace: list = field(default_factory=list)
    iterations_used: int = 0


def _effective_n_k(params: RammParams, data_n, active_size) -> int:
    # subset size shrinks with the active pool; need >= 1 after clamping
    n_k = min(params.resolve_n_k(data_n), active_size - 2)
    if n_k < 1:
        raise TooFewActive(f"active set of {active_size} cannot support any subset draw")
    return n_k


def _min_step(data, active, params, iteration, threads):
    active = sorted(active)
    n_k = _effective_n_k(params, data.n, len(active))
    tmin, pmin, _, _ = min_max_scores(
        data,
        active,
        params.m,
        n_k,
        params.taus,
        params.seed,
        step=STEP_MIN,
        iteration=iteration,
        candidates=np.asarray(active, dtype=np.intp),
        threads=threads,
    )
    threshold = params.alpha_min / n_k if params.bonferroni_min else params.alpha_min
    candidates = [(pmin[i], k) for i, k in enumerate(active) if pmin[i] < threshold]
    candidates.sort()  # ascending p, ties by smaller index
    cap = int(np.floor(params.omega * data.n))
    flagged = tuple(sorted(k for _, k in candidates[:cap]))
    entry = TraceEntry("min", iteration, tuple(active), tmin, pmin, flagged)
    return flagged, entry


def _max_step(data, active, params, iteration, threads):
    active = sorted(active)
    n_k = _effective_n_k(params, data.n, len(active))
    _, _, tmax, pmax = min_max_scores(
        data,
        active,
        params.m,
        n_k,
        params.taus,
        params.seed,
        step=STEP_MAX,
        iteration=iteration,
        candidates=np.asarray(active, dtype=np.intp),
        threads=threads,
    )
    threshold = params.alpha_max / len(active)
    flagged = tuple(sorted(k for i, k in enumerate(active) if pmax[i] < threshold))
    entry = TraceEntry("max", iteration, tuple(active), tmax, pmax, flagged)
    return flagged, entry


def _validation_step(data, clean, candidates, params):
    clean = sorted(clean)
    candidates = sorted(candidates)
    if set(clean) & set(candidates):
        raise InvalidParams("clean set and candidates overlap")
    if len(clean) < 4:
        raise TooFewActive("validation needs at least 4 clean observations")
    if not candidates:
        entry = TraceEntry("validation", 0, (), np.empty(0), np.empty(0), ())
        return (), entry
    levels = np.asarray(params.taus)
    q = levels.size
    clean_rows = np.asarray(clean, dtype=np.intp)
    rho_clean = corr_block_on_rows(data.values, data.response, clean_rows, levels)
    n_aug = len(clean) + 1
    stats = np.empty(len(candidates))
    for i, k in enumerate(candidates):
        rows_aug = np.sort(np.append(clean_rows, k))
        rho_aug = corr_block_on_rows(data.values, data.response, rows_aug, levels)
        stats[i] = n_aug**2 * np.sum(np.mean((rho_aug - rho_clean) ** 2, axis=1))
    p_values = np.array([chi2_tail(s, q) for s in stats])
    threshold = params.alpha_valid / len(candidates)
    flagged = tuple(k for i, k in enumerate(candidates) if p_values[i] < threshold)
    entry = TraceEntry("validation", 0, tuple(candidates), stats, p_values, flagged)
    return flagged, entry


def min_step(data: DataMatrix, active, params: RammParams, iteration=1, threads=1):
    """Anti-swamping step: flag the strongest small-p observations, capped."""
    flagged, _ = _min_step(data, active, params, iteration, threads)
    return set(flagged)


def max_step(data: DataMatrix, active, params: RammParams, iteration=1, threads=1):
    """Anti-masking step: flag everything extreme under Bonferroni."""
    flagged, _ = _max_step(data, active, params, iteration, threads)
    return set(flagged)


def validation_step(data: DataMatrix, clean, candidates, params: RammParams):
    """Confirm candidates one at a time against the clean sample."""
    flagged, _ = _validation_step(data, clean, candidates, params)
    return set(flagged)


def detect(data: DataMatrix, params: RammParams, threads=1) -> DetectionResult:
    """Run the full min/max/validation pipeline and partition the rows."""
    active = set(range(data.n))
    pool = set()
    trace = []
    iterations = 0
    stop = False
    for iteration in range(1, params.max_outer_iters + 1):
        iterations = iteration
        max_flagged = 0
        for step_fn in (_min_step, _max_step):
            try:
                flagged, entry = step_fn(data, active, params, iteration, threads)
            except TooFewActive as err:
                err.trace = trace  # progress up to the failure, for diagnosis
                raise
            trace.append(entry)
            active -= set(flagged)
            pool |= set(flagged)
            if step_fn is _max_step:
                max_flagged = len(flagged)
            if len(active) <= data.n / 2:
                stop = True  # never treat more than half the sample as suspect
                break
        # the min step only shields the aggressive step; iterate again only
        # while the max step keeps uncovering new suspects on the cleaner pool
        if stop or max_flagged == 0:
            break
    confirmed, entry = _validation_step(data, active, pool, params)
    trace.append(entry)
    influential = tuple(sorted(confirmed))
    clean = tuple(sorted(set(range(data.n)) - set(influential)))
    return DetectionResult(influential=influential, clean=clean, trace=trace, iterations_used=iterations)


def detect_single(data: DataMatrix, params: RammParams, threads=1) -> DetectionResult:
    """One-shot leave-one-out detector (no subsets, no iteration).

    Flags observations whose full-sample statistic n^2 * asymD_k exceeds
    the chi-square(q) tail at alpha_valid / n.
    """
    stats, p_values = single_scores(data, params.taus, threads=threads)
    threshold = params.alpha_valid / data.n
    flagged = tuple(int(k) for k in range(data.n) if p_values[k] < threshold)
    entry = TraceEntry("single", 1, tuple(range(data.n)), stats, p_values, flagged)
    clean = tuple(sorted(set(range(data.n)) - set(flagged)))
    return DetectionResult(influential=flagged, clean=clean, trace=[entry], iterations_used=1)


def run_detector(name, data: DataMatrix, params: RammParams, threads=1) -> DetectionResult:
    """Dispatch on the detector identifier.

    HIM and MIP are the single-level reductions of asymHIM and asymMIP:
    the same procedures with the expectile sequence forced to (0.5,).
    """
    if name not in DETECTORS:
        raise InvalidParams(f"unknown detector {name!r}; choose from {DETECTORS}")
    if name in ("HIM", "MIP"):
        params = replace(params, taus=(0.5,))
    if name in ("asymHIM", "HIM"):
        return detect_single(data, params, threads=threads)
    return detect(data, params, threads=threads)
