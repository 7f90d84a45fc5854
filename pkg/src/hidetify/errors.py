"""Exception types shared across the package."""


class HidetifyError(Exception):
    """Base class for all package-specific errors."""


class InvalidSample(HidetifyError):
    """Sample contains non-finite entries or is too short."""


class InvalidLevel(HidetifyError):
    """Expectile level outside the open interval (0, 1)."""


class InvalidParams(HidetifyError):
    """Parameter set violates its documented constraints."""


class NoConvergence(HidetifyError):
    """Iterative solver exhausted its iteration budget."""


class DegenerateColumn(HidetifyError):
    """A column (or the response) is constant on the evaluated rows.

    ``column`` is the offending 0-based column index, or -1 for the
    response vector. ``subset`` identifies the subset being scored when
    the degeneracy arose inside a subset sweep, else None.
    """

    def __init__(self, column, subset=None):
        self.column = column
        self.subset = subset
        where = "response" if column < 0 else f"column {column}"
        msg = f"zero asymmetric variance in {where}"
        if subset is not None:
            msg += f" (subset {subset})"
        super().__init__(msg)


class TooFewActive(HidetifyError):
    """Active set too small to draw subsets of the requested size."""


class ModelIIRequiresP20(HidetifyError):
    """Swamping contamination perturbs the last 20 coefficients; needs p >= 20."""


class EmptyTruth(HidetifyError):
    """True-positive rate is undefined without ground-truth influentials."""
