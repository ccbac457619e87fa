"""Exception types shared across cidlab modules."""


class CidlabError(Exception):
    """Base class for all cidlab errors."""


class ParameterError(CidlabError, ValueError):
    """Invalid distribution or process-spec parameters."""


class MatrixError(CidlabError, ValueError):
    """Covariance matrix is not symmetric PSD within tolerance."""


class SizeError(CidlabError, ValueError):
    """Sample or path too small for the requested operation."""


class PartitionError(CidlabError, ValueError):
    """Interval partition is not ordered, disjoint, and covering."""


class LawError(CidlabError, ValueError):
    """Invalid random-law ingredient (negative variance, non-monotone cdf)."""


class UnsupportedCombinationError(CidlabError):
    """Operation has no closed form for this family/function combination."""
