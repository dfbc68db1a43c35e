"""Exception types shared across the package.

Everything derives from :class:`NbRegionError` so callers can catch the
package's failures with a single except clause; each class also derives
from ``ValueError`` because they all signal bad inputs of one kind or
another.
"""


class NbRegionError(ValueError):
    """Base class for errors raised by this package."""


class EmptySample(NbRegionError):
    """Fewer than two counts were supplied."""


class NegativeCount(NbRegionError):
    """Counts must be nonnegative integers."""


class ZeroMean(NbRegionError):
    """Every count is zero, so log-scale estimates are undefined."""


class ZeroVariance(NbRegionError):
    """The sample is constant, so the dispersion estimate is undefined."""


class DomainInvalid(NbRegionError):
    """A parameter point lies outside the domain of the requested quantity."""


class GridTooCoarse(NbRegionError):
    """A contour grid needs at least two points along each axis."""


class EmptyGrid(NbRegionError):
    """No valid grid point remains, so there is nothing to evaluate or render."""
